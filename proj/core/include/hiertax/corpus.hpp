#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hiertax/taxonomy.hpp"

namespace hiertax {

struct RawRecord {
  std::string id;
  std::string title;
  std::string description;
  std::vector<std::string> path;  // category names, root first
};

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  PathId path_label = 0;
};

struct Vocabulary {
  std::unordered_map<std::string, std::uint32_t> index;  // dense 0..|V|-1
  std::vector<std::uint32_t> df;                         // by index
  std::uint32_t doc_count = 0;
};

struct IdfTable {
  std::unordered_map<std::string, double> idf;

  double lookup(const std::string& word) const {
    auto it = idf.find(word);
    return it == idf.end() ? 0.0 : it->second;
  }
};

struct TokenizerOptions {
  std::unordered_set<std::string> stop_words;
  std::size_t min_token_length = 1;
};

// Description first, then the title repeated title_weight times.
std::string compose_text(const std::string& title, const std::string& description,
                         int title_weight = 3);

// Lowercases, keeps letters/digits (non-ASCII bytes pass through), splits on
// the rest, drops stop words and too-short tokens.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts = {});

struct Rejection {
  std::string id;
  std::string reason;  // ambiguous_label | unknown_path | empty_tokens | malformed
};

struct IngestOptions {
  int title_weight = 3;
  std::unordered_set<std::string> reject_labels = {"others", "general", "wrong procurement"};
  TokenizerOptions tokenizer;
};

struct IngestResult {
  std::vector<Document> documents;
  std::vector<Rejection> rejections;
};

IngestResult ingest(const std::vector<RawRecord>& records, const TaxonomyTree& taxonomy,
                    const IngestOptions& opts = {});

// Smoothed idf(w) = ln((1+N)/(1+df(w))) + 1; df counts documents, not terms.
std::pair<Vocabulary, IdfTable> compute_idf(const std::vector<Document>& documents);

// JSON-lines corpus files: {"id","title","description","path":[...]}
std::vector<RawRecord> read_records_jsonl(const std::string& path);
void write_records_jsonl(const std::vector<RawRecord>& records, const std::string& path);
void write_rejections_jsonl(const std::vector<Rejection>& rejections, const std::string& path);

// Deterministic (sorted) idf serialization.
std::string idf_to_json(const IdfTable& idf);
IdfTable idf_from_json(const std::string& text);

}  // namespace hiertax
