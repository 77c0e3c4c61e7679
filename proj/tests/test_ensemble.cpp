#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "hiertax/ensemble.hpp"
#include "hiertax/error.hpp"
#include "hiertax/syngen.hpp"

using namespace hiertax;

namespace {

// Four paths over a small two-level taxonomy:
//   a/x, a/y, b/z, b  (b is both an inner node and a path of its own)
TaxonomyTree toy_taxonomy() {
  return TaxonomyTree::build({{"a", "x"}, {"a", "y"}, {"b", "z"}, {"b"}});
}

std::vector<Document> toy_documents(const TaxonomyTree& tax, std::size_t per_path) {
  std::vector<Document> docs;
  for (PathId p = 0; p < tax.path_count(); ++p) {
    for (std::size_t i = 0; i < per_path; ++i) {
      Document d;
      d.id = "doc" + std::to_string(docs.size());
      d.tokens = {"t"};
      d.path_label = p;
      docs.push_back(d);
    }
  }
  return docs;
}

// Separable features: per-path centers on the corners of a square, plus noise.
FeatureMatrix toy_features(const std::vector<Document>& docs, std::uint64_t seed) {
  FeatureMatrix m;
  m.cols = 6;
  m.rows = docs.size();
  m.data.resize(m.rows * m.cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.3f);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const PathId p = docs[i].path_label;
    float* row = m.row(i);
    row[0] = (p & 1 ? 4.0f : 0.0f) + noise(rng);
    row[1] = (p & 2 ? 4.0f : 0.0f) + noise(rng);
    for (std::size_t j = 2; j < m.cols; ++j) row[j] = noise(rng);
  }
  return m;
}

EnsembleConfig toy_config(std::uint64_t seed) {
  EnsembleConfig cfg;
  cfg.path_forest.trees = 8;
  cfg.node_forest.trees = 8;
  cfg.depth_forest.trees = 8;
  cfg.m_out = 20;
  cfg.seed = seed;
  return cfg;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("hiertax_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("depth_training_set labels rows by dense depth position, NONE last") {
  auto tax = toy_taxonomy();
  // paths: a/x=0, a/y=1, b/z=2, b=3; depth-2 nodes ascending: x, y, z
  auto docs = toy_documents(tax, 1);  // one doc per path
  auto rows = depth_training_set(docs, tax, 2, 0.0, 1);
  // no NONE sampling: only the three depth-2 docs
  REQUIRE(rows.size() == 3);
  const auto depth2 = tax.nodes_at_depth(2);
  REQUIRE(depth2.size() == 3);
  for (const auto& [doc_idx, label] : rows) {
    auto node = tax.node_label_at_depth(docs[doc_idx].path_label, 2);
    REQUIRE(node.has_value());
    CHECK(depth2[label] == *node);
  }
}

TEST_CASE("depth_training_set samples ceil(fraction * shorter) NONE rows") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 10);  // 30 docs reach depth 2, 10 stop at depth 1
  auto rows = depth_training_set(docs, tax, 2, 0.25, 7);
  std::size_t none_rows = 0;
  const std::uint32_t none_class = static_cast<std::uint32_t>(tax.nodes_at_depth(2).size());
  for (const auto& [doc_idx, label] : rows) {
    if (label == none_class) {
      ++none_rows;
      CHECK(docs[doc_idx].path_label == 3);  // the depth-1 path
    }
  }
  CHECK(none_rows == 3);  // ceil(0.25 * 10)
  CHECK(rows.size() == 33);

  // fraction rounding: ceil(0.01 * 10) = 1
  auto rows2 = depth_training_set(docs, tax, 2, 0.01, 7);
  CHECK(rows2.size() == 31);
}

TEST_CASE("depth_training_set is deterministic and sorted by document index") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 20);
  auto a = depth_training_set(docs, tax, 2, 0.5, 99);
  auto b = depth_training_set(docs, tax, 2, 0.5, 99);
  CHECK(a == b);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].first < a[i].first);
  auto c = depth_training_set(docs, tax, 2, 0.5, 100);
  CHECK(a.size() == c.size());  // same count, possibly different NONE sample
}

TEST_CASE("depth_training_set rejects depths with no reaching documents") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 2);
  CHECK_THROWS_AS(depth_training_set(docs, tax, 3, 0.1, 1), Error);
}

TEST_CASE("train_node_set emits one row per path node") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 1);
  auto rows = train_node_set(docs, tax);
  // depths: 2 + 2 + 2 + 1 = 7 rows
  CHECK(rows.size() == 7);
  for (const auto& [doc_idx, node_id] : rows) {
    const auto& path = tax.path_nodes(docs[doc_idx].path_label);
    CHECK(std::find(path.begin(), path.end(), node_id) != path.end());
  }
}

TEST_CASE("meta dimension follows the block layout law") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 8);
  auto features = toy_features(docs, 11);
  auto model = train_ensemble(features, docs, tax, toy_config(21));

  // feature_dim + |paths| + |nodes| + sum_k (|nodes_at_depth(k)| + 1)
  std::size_t expect = features.cols + tax.path_count() + tax.node_count();
  for (std::uint32_t k = 1; k <= tax.max_depth(); ++k)
    expect += tax.nodes_at_depth(k).size() + 1;
  CHECK(model.bundle.meta_dim(features.cols) == expect);

  auto meta = meta_features(features.row(0), features.cols, model.bundle);
  CHECK(meta.size() == expect);
}

TEST_CASE("meta probability blocks each sum to one") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 8);
  auto features = toy_features(docs, 30);
  auto model = train_ensemble(features, docs, tax, toy_config(31));

  auto meta = meta_features(features.row(5), features.cols, model.bundle);
  std::size_t off = features.cols;
  auto block_sum = [&](std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += meta[off + i];
    off += n;
    return s;
  };
  CHECK(block_sum(tax.path_count()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(block_sum(tax.node_count()) == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t sz : model.bundle.depth_block_sizes)
    CHECK(block_sum(sz) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(off == meta.size());

  // the feature prefix is passed through unchanged
  for (std::size_t j = 0; j < features.cols; ++j)
    CHECK(meta[j] == doctest::Approx(features.row(5)[j]));
}

TEST_CASE("predict_top_k returns k descending unique paths") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 10);
  auto features = toy_features(docs, 41);
  auto model = train_ensemble(features, docs, tax, toy_config(43));

  for (std::size_t i = 0; i < docs.size(); i += 3) {
    auto preds = predict_top_k(features.row(i), features.cols, model, 3);
    REQUIRE(preds.size() == 3);
    std::set<PathId> seen;
    double prev = 2.0;
    for (const auto& [path, prob] : preds) {
      CHECK(path < tax.path_count());
      CHECK(seen.insert(path).second);
      CHECK(prob <= prev + 1e-12);
      CHECK(prob >= 0.0);
      prev = prob;
    }
  }
  // k_top larger than the path space is clamped
  auto all = predict_top_k(features.row(0), features.cols, model, 50);
  CHECK(all.size() == tax.path_count());
}

TEST_CASE("ensemble training is deterministic") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 8);
  auto features = toy_features(docs, 51);
  auto cfg = toy_config(53);
  auto a = train_ensemble(features, docs, tax, cfg);
  auto b = train_ensemble(features, docs, tax, cfg);
  CHECK(a.final_clf.to_json() == b.final_clf.to_json());
  CHECK(a.selector.to_json() == b.selector.to_json());
  CHECK(a.bundle.path_clf.to_json() == b.bundle.path_clf.to_json());
  for (std::size_t i = 0; i < docs.size(); ++i)
    CHECK(predict_top_k(features.row(i), features.cols, a, 3) ==
          predict_top_k(features.row(i), features.cols, b, 3));
}

TEST_CASE("m_out larger than the meta dimension is capped") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 8);
  auto features = toy_features(docs, 61);
  auto cfg = toy_config(63);
  cfg.m_out = 100000;
  auto model = train_ensemble(features, docs, tax, cfg);
  CHECK(model.selector.indices.size() <= model.bundle.meta_dim(features.cols));
  CHECK(model.selector.indices.size() > 0);
}

TEST_CASE("naive (non-out-of-fold) stacking also trains and predicts") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 8);
  auto features = toy_features(docs, 71);
  auto cfg = toy_config(73);
  cfg.out_of_fold = false;
  auto model = train_ensemble(features, docs, tax, cfg);
  auto preds = predict_top_k(features.row(0), features.cols, model, 2);
  CHECK(preds.size() == 2);
}

TEST_CASE("bundle save/load round trip preserves predictions") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 8);
  auto features = toy_features(docs, 81);
  auto model = train_ensemble(features, docs, tax, toy_config(83));

  TempDir dir("bundle");
  save_ensemble(model, dir.path.string());
  auto restored = load_ensemble(dir.path.string());
  CHECK(restored.feature_dim == model.feature_dim);
  CHECK(restored.bundle.depth_block_sizes == model.bundle.depth_block_sizes);
  for (std::size_t i = 0; i < docs.size(); ++i)
    CHECK(predict_top_k(features.row(i), features.cols, restored, 4) ==
          predict_top_k(features.row(i), features.cols, model, 4));
}

TEST_CASE("load_ensemble reports a missing bundle") {
  CHECK_THROWS_WITH_AS(load_ensemble("/nonexistent/bundle/dir"),
                       doctest::Contains("bundle_not_found"), Error);
}

TEST_CASE("predict_path_only ranks by path classifier probability") {
  auto tax = toy_taxonomy();
  auto docs = toy_documents(tax, 10);
  auto features = toy_features(docs, 91);
  auto model = train_ensemble(features, docs, tax, toy_config(93));
  auto preds = predict_path_only(features.row(2), features.cols, model.bundle.path_clf,
                                 tax.path_count(), 2);
  REQUIRE(preds.size() == 2);
  CHECK(preds[0].second >= preds[1].second);
  // row 2 belongs to path 0, which is fully separable here
  CHECK(preds[0].first == docs[2].path_label);
}

}  // TEST_SUITE
