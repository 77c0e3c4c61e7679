#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiertax/corpus.hpp"
#include "hiertax/io.hpp"
#include "hiertax/learners.hpp"
#include "hiertax/metrics.hpp"
#include "hiertax/taxonomy.hpp"

namespace hiertax {

struct EnsembleConfig {
  ForestConfig path_forest;   // PP and the level-two FPP
  ForestConfig node_forest;   // NP
  ForestConfig depth_forest;  // DNP_k
  std::size_t m_out = 8000;   // ANOVA-selected meta dimension, capped at meta dim
  double none_fraction = 0.10;
  int oof_folds = 3;
  bool out_of_fold = true;  // false reproduces the naive single-fit protocol
  std::uint64_t seed = 0;
  int workers = 1;
};

// Level-one classifiers plus the fixed probability-block layouts. Blocks span
// the full label spaces (all paths, all nodes, all nodes per depth + NONE),
// so meta dimensions do not depend on which labels appear in training.
struct LevelOneBundle {
  ForestModel path_clf;
  ForestModel node_clf;
  std::vector<ForestModel> depth_clf;  // index 0 = depth 1

  std::size_t n_paths = 0;
  std::size_t n_nodes = 0;
  std::vector<std::size_t> depth_block_sizes;  // |nodes_at_depth(k)| + 1
  std::vector<std::vector<std::uint32_t>> depth_node_ids;  // per depth, ascending

  std::size_t prob_dim() const;
  std::size_t meta_dim(std::size_t feature_dim) const { return feature_dim + prob_dim(); }
};

struct EnsembleModel {
  LevelOneBundle bundle;
  AnovaSelector selector;
  ForestModel final_clf;  // level-two path predictor
  std::size_t feature_dim = 0;
  std::uint64_t seed = 0;
};

// Rows that reach depth k labeled by their node there, plus a seeded sample of
// ceil(none_fraction * shorter) shorter-path rows labeled NONE. Labels use the
// depth classifier's dense space: position in depth_node_ids, NONE last.
std::vector<std::pair<std::size_t, std::uint32_t>> depth_training_set(
    const std::vector<Document>& documents, const TaxonomyTree& taxonomy, std::uint32_t k,
    double none_fraction, std::uint64_t seed);

// One row per node on each document's path, labeled with that NodeId.
std::vector<std::pair<std::size_t, std::uint32_t>> train_node_set(
    const std::vector<Document>& documents, const TaxonomyTree& taxonomy);

EnsembleModel train_ensemble(const FeatureMatrix& features,
                             const std::vector<Document>& documents,
                             const TaxonomyTree& taxonomy, const EnsembleConfig& config);

// Feature row followed by the PP, NP, DNP_1..K probability blocks.
std::vector<double> meta_features(const float* row, std::size_t dim,
                                  const LevelOneBundle& bundle);

PredictionList predict_top_k(const float* row, std::size_t dim, const EnsembleModel& model,
                             std::size_t k_top);

// Path-only baseline: read the path classifier directly.
PredictionList predict_path_only(const float* row, std::size_t dim, const ForestModel& path_clf,
                                 std::size_t n_paths, std::size_t k_top);

// Model bundle directory: manifest.json + per-classifier JSON files.
void save_ensemble(const EnsembleModel& model, const std::string& dir);
EnsembleModel load_ensemble(const std::string& dir);

}  // namespace hiertax
