#include "hiertax/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"

namespace hiertax {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("file_not_found", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_failed", tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write_failed", tmp.string());
  }
  fs::rename(tmp, target);
}

void save_feature_matrix(const FeatureMatrix& m, const std::string& base_path) {
  if (m.data.size() != m.rows * m.cols)
    throw Error("shape_mismatch", "feature matrix data size does not match rows*cols");
  json manifest;
  manifest["format_version"] = 1;
  manifest["rows"] = m.rows;
  manifest["cols"] = m.cols;
  manifest["dtype"] = "f32le";
  manifest["layout"] = m.layout;
  manifest["clusters"] = m.clusters;
  manifest["word_dim"] = m.word_dim;
  manifest["data_file"] = fs::path(base_path).filename().string() + ".f32";
  atomic_write(base_path + ".json", manifest.dump(2) + "\n");
  std::string payload(reinterpret_cast<const char*>(m.data.data()), m.data.size() * sizeof(float));
  atomic_write(base_path + ".f32", payload);
}

FeatureMatrix load_feature_matrix(const std::string& base_path) {
  json manifest;
  try {
    manifest = json::parse(read_file(base_path + ".json"));
  } catch (const json::exception& e) {
    throw Error("manifest_parse_error", e.what());
  }
  FeatureMatrix m;
  m.rows = manifest.at("rows").get<std::size_t>();
  m.cols = manifest.at("cols").get<std::size_t>();
  m.layout = manifest.value("layout", "dense");
  m.clusters = manifest.value("clusters", 0u);
  m.word_dim = manifest.value("word_dim", 0u);
  std::string payload = read_file(base_path + ".f32");
  if (payload.size() != m.rows * m.cols * sizeof(float))
    throw Error("shape_mismatch", "payload size does not match manifest dims");
  m.data.resize(m.rows * m.cols);
  std::memcpy(m.data.data(), payload.data(), payload.size());
  return m;
}

}  // namespace hiertax
