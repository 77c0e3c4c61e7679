#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiertax/corpus.hpp"
#include "hiertax/embeddings.hpp"
#include "hiertax/ensemble.hpp"
#include "hiertax/syngen.hpp"

namespace hiertax {

// Single run configuration; every component RNG seed is derived from
// master_seed, so one seed reproduces the full pipeline.
struct RunConfig {
  std::uint64_t master_seed = 42;
  int workers = 1;

  int title_weight = 3;
  std::vector<std::string> reject_labels = {"others", "general", "wrong procurement"};

  SgnsConfig sgns;
  std::uint32_t clusters = 10;  // K
  int kmeans_max_iters = 100;

  EnsembleConfig ensemble;
  std::size_t tfidf_features = 2000;

  std::vector<std::size_t> k_top_list = {1, 3, 6};
  double alpha = 0.1;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
};

}  // namespace hiertax
