#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "hiertax/corpus.hpp"
#include "hiertax/embeddings.hpp"

namespace hiertax {

struct ClusterModel {
  std::uint32_t k = 0;
  std::uint32_t dim = 0;
  std::vector<double> centroids;  // k rows of dim
  std::unordered_map<std::string, std::uint32_t> assignment;

  std::uint32_t cluster_of(const std::string& word) const;
  std::string to_json() const;
  static ClusterModel from_json(const std::string& text);
};

// Lloyd's algorithm with k-means++ seeding; empty clusters are re-seeded from
// the point farthest from its centroid. When sse_per_iter is given it records
// the within-cluster SSE after each assignment step.
ClusterModel kmeans(const WordVectorTable& table, std::uint32_t k, std::uint64_t seed,
                    int max_iters = 100, std::vector<double>* sse_per_iter = nullptr);

// Per-cluster word-vector sums followed by per-cluster idf sums; dimension
// k*d + k. OOV tokens are skipped; *degenerate reports an all-OOV document.
std::vector<double> gwbowv(const Document& doc, const ClusterModel& cluster, const IdfTable& idf,
                           const WordVectorTable& table, bool* degenerate = nullptr);

// Mean of in-vocabulary token vectors (zero vector when none).
std::vector<double> awv(const Document& doc, const WordVectorTable& table);

// Histogram of in-vocabulary tokens over the k clusters.
std::vector<double> bocv(const Document& doc, const ClusterModel& cluster);

// Top-m unigram+bigram feature space ranked by corpus frequency, with
// document-frequency idf per feature.
struct TfidfModel {
  std::vector<std::string> features;  // bigrams joined with a space
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<double> idf;

  std::size_t size() const { return features.size(); }
  std::string to_json() const;
  static TfidfModel from_json(const std::string& text);
};

TfidfModel build_tfidf_model(const std::vector<Document>& documents, std::size_t m);

// index -> tf*idf weight, restricted to the model's feature set
std::map<std::uint32_t, double> tfidf_vector(const Document& doc, const TfidfModel& model);

}  // namespace hiertax
