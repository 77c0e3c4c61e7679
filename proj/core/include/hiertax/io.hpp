#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiertax {

std::string read_file(const std::string& path);

// Writes to a temp file in the same directory, then renames into place.
void atomic_write(const std::string& path, const std::string& content);

// Dense row-major float32 matrix persisted as <base>.json manifest plus
// <base>.f32 little-endian payload.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;  // rows * cols

  const float* row(std::size_t i) const { return data.data() + i * cols; }
  float* row(std::size_t i) { return data.data() + i * cols; }

  // layout metadata recorded in the manifest
  std::string layout = "dense";
  std::uint32_t clusters = 0;  // K, when layout == "gwbowv"
  std::uint32_t word_dim = 0;  // d
};

void save_feature_matrix(const FeatureMatrix& m, const std::string& base_path);
FeatureMatrix load_feature_matrix(const std::string& base_path);

}  // namespace hiertax
