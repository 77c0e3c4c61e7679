#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hiertax/corpus.hpp"

namespace hiertax {

struct WordVectorTable {
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<double> data;  // row-major, one row per word
  std::uint32_t dim = 0;

  std::size_t size() const { return index.size(); }
  bool contains(const std::string& word) const { return index.count(word) > 0; }
  std::span<const double> vec(const std::string& word) const;
  std::span<const double> vec(std::uint32_t row) const {
    return {data.data() + static_cast<std::size_t>(row) * dim, dim};
  }
};

struct SgnsConfig {
  int dim = 200;
  int window = 5;
  int negative = 5;
  int epochs = 5;
  double learning_rate = 0.025;  // linearly decayed
  int min_count = 5;
  double noise_exponent = 0.75;
  std::uint64_t seed = 0;
};

struct SgnsTrainReport {
  std::vector<double> epoch_mean_loss;
};

// Skip-gram with negative sampling; returns input-side vectors.
// Deterministic for a fixed seed (single worker).
WordVectorTable train_sgns(const std::vector<Document>& documents, const SgnsConfig& config,
                           SgnsTrainReport* report = nullptr);

double cosine(const std::string& w1, const std::string& w2, const WordVectorTable& table);

// word2vec text format: "<count> <dim>" header, then word + floats per line.
WordVectorTable load_word_vectors(const std::string& path);
void save_word_vectors(const WordVectorTable& table, const std::string& path);

// One (center, positive context, negatives) term of the SGNS objective:
//   loss = -log s(u_pos.v) - sum_n log s(-u_n.v)
// Exposed as a pure function so gradients can be finite-difference checked.
double sgns_pair_loss(std::span<const double> center, std::span<const double> positive,
                      const std::vector<std::vector<double>>& negatives);

struct SgnsGradients {
  std::vector<double> center;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;
};

SgnsGradients sgns_pair_gradients(std::span<const double> center, std::span<const double> positive,
                                  const std::vector<std::vector<double>>& negatives);

}  // namespace hiertax
