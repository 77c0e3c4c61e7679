#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiertax {

struct LabeledMatrix {
  std::size_t cols = 0;
  std::vector<float> data;           // rows * cols, row-major
  std::vector<std::uint32_t> labels;  // one per row

  std::size_t rows() const { return labels.size(); }
  const float* row(std::size_t i) const { return data.data() + i * cols; }

  void push_row(const float* values, std::uint32_t label) {
    data.insert(data.end(), values, values + cols);
    labels.push_back(label);
  }
};

struct ForestConfig {
  int trees = 20;
  int max_depth = -1;  // unlimited
  int min_samples_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct TreeNode {
  std::uint32_t feature = 0;
  float threshold = 0.0f;  // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<float> distribution;  // leaf only, over class indices

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
};

// Random forest of CART trees, Gini splits over ceil(sqrt(m)) random feature
// candidates, leaves holding class distributions.
struct ForestModel {
  std::vector<std::uint32_t> classes;  // sorted distinct training labels
  std::size_t input_dim = 0;
  std::vector<Tree> trees;

  std::string to_json() const;
  static ForestModel from_json(const std::string& text);
};

ForestModel train_forest(const LabeledMatrix& data, const ForestConfig& config);

// Average of per-tree leaf distributions; indexed by model.classes order.
std::vector<double> forest_proba(const ForestModel& model, const float* row, std::size_t dim);

struct KnnModel {
  std::size_t k_neighbors = 0;
  LabeledMatrix data;
  std::vector<std::uint32_t> classes;
};

KnnModel train_knn(const LabeledMatrix& data, std::size_t k_neighbors);

// Inverse-distance-weighted votes over the k nearest rows. Distance ties are
// broken by lower row index; zero-distance neighbors take all the mass.
std::vector<double> knn_proba(const KnnModel& model, const float* row, std::size_t dim);

struct AnovaSelector {
  std::size_t input_dim = 0;
  std::vector<std::uint32_t> indices;  // descending F, ties by ascending index
  std::vector<double> f_scores;        // parallel to indices

  std::string to_json() const;
  static AnovaSelector from_json(const std::string& text);
};

// One-way ANOVA F per feature, epsilon-regularized against zero within-group
// variance: F = (SSB/(c-1)) / ((SSW+eps)/(n-c)).
AnovaSelector anova_select(const LabeledMatrix& data, std::size_t m_out);

std::vector<float> apply_selector(const AnovaSelector& selector, const float* row, std::size_t dim);

}  // namespace hiertax
