#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hiertax/corpus.hpp"

namespace hiertax {

struct SynthConfig {
  std::vector<int> branching = {4, 3, 2};  // children per level
  int words_per_node = 20;
  int noise_vocab = 100;
  int min_tokens = 20;
  int max_tokens = 40;
  int docs_per_leaf = 100;       // base count before skew
  double skew = 1.0;             // Zipf-like exponent over leaf rank
  double topic_fraction = 0.7;   // share of tokens drawn from path vocabularies
  std::uint64_t seed = 0;
  // planted confusion: the pair of leaf indices shares overlap of its topic words
  std::optional<std::pair<int, int>> confusion_pair;
  double confusion_overlap = 0.0;
};

struct SynthResult {
  std::vector<RawRecord> records;
  std::vector<std::vector<std::string>> paths;  // all leaf paths, leaf-index order
};

// Deterministic synthetic corpus: skewed leaf document counts, per-node topic
// vocabularies shared along ancestor chains plus global noise words.
SynthResult generate(const SynthConfig& config);

SynthConfig plant_confusion(SynthConfig config, int leaf_a, int leaf_b, double overlap);

}  // namespace hiertax
