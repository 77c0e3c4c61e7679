#include "hiertax/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"
#include "hiertax/io.hpp"

namespace hiertax {

using json = nlohmann::json;

std::string compose_text(const std::string& title, const std::string& description,
                         int title_weight) {
  if (title_weight < 1) throw Error("bad_title_weight", "title_weight must be >= 1");
  std::string out;
  auto append = [&out](const std::string& part) {
    if (part.empty()) return;
    if (!out.empty()) out += ' ';
    out += part;
  };
  append(description);
  for (int i = 0; i < title_weight; ++i) append(title);
  return out;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= opts.min_token_length && !opts.stop_words.count(cur))
      tokens.push_back(cur);
    cur.clear();
  };
  for (unsigned char c : text) {
    if (c >= 0x80) {
      cur += static_cast<char>(c);  // keep non-ASCII bytes
    } else if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

IngestResult ingest(const std::vector<RawRecord>& records, const TaxonomyTree& taxonomy,
                    const IngestOptions& opts) {
  IngestResult result;
  for (const auto& rec : records) {
    if (rec.id.empty() || rec.path.empty()) {
      result.rejections.push_back({rec.id, "malformed"});
      continue;
    }
    bool ambiguous = false;
    for (const auto& name : rec.path)
      if (opts.reject_labels.count(name)) ambiguous = true;
    if (ambiguous) {
      result.rejections.push_back({rec.id, "ambiguous_label"});
      continue;
    }
    auto path_id = taxonomy.find_path(rec.path);
    if (!path_id) {
      result.rejections.push_back({rec.id, "unknown_path"});
      continue;
    }
    auto tokens = tokenize(compose_text(rec.title, rec.description, opts.title_weight),
                           opts.tokenizer);
    if (tokens.empty()) {
      result.rejections.push_back({rec.id, "empty_tokens"});
      continue;
    }
    result.documents.push_back({rec.id, std::move(tokens), *path_id});
  }
  return result;
}

std::pair<Vocabulary, IdfTable> compute_idf(const std::vector<Document>& documents) {
  if (documents.empty()) throw Error("empty_corpus", "compute_idf needs at least one document");
  Vocabulary vocab;
  vocab.doc_count = static_cast<std::uint32_t>(documents.size());
  for (const auto& doc : documents) {
    std::unordered_set<std::string> seen;
    for (const auto& tok : doc.tokens) seen.insert(tok);
    for (const auto& tok : seen) {
      auto [it, inserted] = vocab.index.emplace(tok, static_cast<std::uint32_t>(vocab.index.size()));
      if (inserted) vocab.df.push_back(0);
      ++vocab.df[it->second];
    }
  }
  IdfTable idf;
  const double n = static_cast<double>(vocab.doc_count);
  for (const auto& [word, idx] : vocab.index)
    idf.idf[word] = std::log((1.0 + n) / (1.0 + vocab.df[idx])) + 1.0;
  return {std::move(vocab), std::move(idf)};
}

std::vector<RawRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("file_not_found", path);
  std::vector<RawRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      RawRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.title = j.value("title", "");
      rec.description = j.value("description", "");
      rec.path = j.at("path").get<std::vector<std::string>>();
      records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw Error("record_parse_error",
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void write_records_jsonl(const std::vector<RawRecord>& records, const std::string& path) {
  std::ostringstream out;
  for (const auto& rec : records) {
    json j;
    j["id"] = rec.id;
    j["title"] = rec.title;
    j["description"] = rec.description;
    j["path"] = rec.path;
    out << j.dump() << '\n';
  }
  atomic_write(path, out.str());
}

void write_rejections_jsonl(const std::vector<Rejection>& rejections, const std::string& path) {
  std::ostringstream out;
  for (const auto& r : rejections) {
    json j;
    j["id"] = r.id;
    j["reason"] = r.reason;
    out << j.dump() << '\n';
  }
  atomic_write(path, out.str());
}

std::string idf_to_json(const IdfTable& idf) {
  std::map<std::string, double> sorted(idf.idf.begin(), idf.idf.end());
  json j;
  j["format_version"] = 1;
  j["idf"] = sorted;
  return j.dump(2);
}

IdfTable idf_from_json(const std::string& text) {
  IdfTable table;
  try {
    json j = json::parse(text);
    for (auto& [word, value] : j.at("idf").items())
      table.idf[word] = value.get<double>();
  } catch (const json::exception& e) {
    throw Error("idf_parse_error", e.what());
  }
  return table;
}

}  // namespace hiertax
