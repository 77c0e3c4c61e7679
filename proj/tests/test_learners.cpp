#include <doctest.h>

#include <cmath>
#include <random>

#include "hiertax/error.hpp"
#include "hiertax/learners.hpp"

using namespace hiertax;

namespace {

// two linearly separated 2-d blobs
LabeledMatrix blob_data(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.5f);
  LabeledMatrix m;
  m.cols = 2;
  for (std::size_t i = 0; i < per_class; ++i) {
    float row[2] = {noise(rng), noise(rng)};
    m.push_row(row, 0);
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    float row[2] = {5.0f + noise(rng), 5.0f + noise(rng)};
    m.push_row(row, 1);
  }
  return m;
}

std::uint32_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<std::uint32_t>(best);
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("forest reaches 100% training accuracy on separable blobs") {
  auto data = blob_data(100, 3);
  ForestConfig cfg;
  cfg.seed = 7;
  auto model = train_forest(data, cfg);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto proba = forest_proba(model, data.row(i), data.cols);
    CHECK(model.classes[argmax(proba)] == data.labels[i]);
  }
}

TEST_CASE("forest probabilities sum to one and are nonnegative") {
  auto data = blob_data(50, 4);
  ForestConfig cfg;
  cfg.seed = 9;
  auto model = train_forest(data, cfg);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-5.0f, 10.0f);
  for (int trial = 0; trial < 1000; ++trial) {
    float row[2] = {u(rng), u(rng)};
    auto proba = forest_proba(model, row, 2);
    double sum = 0.0;
    for (double p : proba) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("forest_proba averages per-tree leaf distributions") {
  // 20 hand-built stump-free trees: 15 vote pure class 0, 5 pure class 1
  ForestModel model;
  model.classes = {0, 1};
  model.input_dim = 1;
  for (int t = 0; t < 20; ++t) {
    Tree tree;
    TreeNode leaf;
    leaf.distribution = t < 15 ? std::vector<float>{1.0f, 0.0f} : std::vector<float>{0.0f, 1.0f};
    tree.nodes.push_back(leaf);
    model.trees.push_back(tree);
  }
  float row[1] = {0.0f};
  auto proba = forest_proba(model, row, 1);
  CHECK(proba[0] == doctest::Approx(0.75));
  CHECK(proba[1] == doctest::Approx(0.25));
}

TEST_CASE("forest training is deterministic given a seed") {
  auto data = blob_data(40, 12);
  ForestConfig cfg;
  cfg.seed = 77;
  auto a = train_forest(data, cfg);
  auto b = train_forest(data, cfg);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-2.0f, 7.0f);
  for (int trial = 0; trial < 50; ++trial) {
    float row[2] = {u(rng), u(rng)};
    CHECK(forest_proba(a, row, 2) == forest_proba(b, row, 2));
  }
}

TEST_CASE("forest parallel training matches serial") {
  auto data = blob_data(40, 13);
  ForestConfig serial;
  serial.seed = 5;
  ForestConfig parallel = serial;
  parallel.workers = 4;
  auto a = train_forest(data, serial);
  auto b = train_forest(data, parallel);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("forest rejects single-class data and handles tiny samples") {
  LabeledMatrix single;
  single.cols = 1;
  float row[1] = {0.0f};
  single.push_row(row, 3);
  single.push_row(row, 3);
  CHECK_THROWS_AS(train_forest(single, ForestConfig{}), Error);

  // one sample per class: must not crash
  LabeledMatrix tiny;
  tiny.cols = 1;
  float r0[1] = {0.0f}, r1[1] = {1.0f};
  tiny.push_row(r0, 0);
  tiny.push_row(r1, 1);
  ForestConfig cfg;
  cfg.min_samples_leaf = 1;
  auto model = train_forest(tiny, cfg);
  auto proba = forest_proba(model, r0, 1);
  CHECK(proba.size() == 2);
}

TEST_CASE("forest_proba rejects dimension mismatch") {
  auto data = blob_data(20, 1);
  auto model = train_forest(data, ForestConfig{});
  float row[3] = {0, 0, 0};
  CHECK_THROWS_AS(forest_proba(model, row, 3), Error);
}

TEST_CASE("knn exact match with k=1") {
  auto data = blob_data(10, 2);
  auto model = train_knn(data, 1);
  auto proba = knn_proba(model, data.row(3), data.cols);
  CHECK(proba[0] == doctest::Approx(1.0));
}

TEST_CASE("knn equidistant symmetric query splits evenly") {
  LabeledMatrix m;
  m.cols = 1;
  float a[1] = {-1.0f}, b[1] = {1.0f};
  m.push_row(a, 0);
  m.push_row(b, 1);
  auto model = train_knn(m, 2);
  float q[1] = {0.0f};
  auto proba = knn_proba(model, q, 1);
  CHECK(proba[0] == doctest::Approx(0.5));
  CHECK(proba[1] == doctest::Approx(0.5));
}

TEST_CASE("knn k=n matches the inverse-distance oracle") {
  LabeledMatrix m;
  m.cols = 1;
  float r0[1] = {0.0f}, r1[1] = {2.0f}, r2[1] = {5.0f};
  m.push_row(r0, 0);
  m.push_row(r1, 1);
  m.push_row(r2, 1);
  auto model = train_knn(m, 3);
  float q[1] = {1.0f};
  auto proba = knn_proba(model, q, 1);
  const double w0 = 1.0 / 1.0, w1 = 1.0 / 1.0, w2 = 1.0 / 4.0;
  CHECK(proba[0] == doctest::Approx(w0 / (w0 + w1 + w2)).epsilon(1e-12));
  CHECK(proba[1] == doctest::Approx((w1 + w2) / (w0 + w1 + w2)).epsilon(1e-12));
}

TEST_CASE("knn rejects k > n") {
  auto data = blob_data(5, 3);
  CHECK_THROWS_AS(train_knn(data, 11), Error);
}

TEST_CASE("anova fixture yields F = 8") {
  LabeledMatrix m;
  m.cols = 1;
  float values[4] = {0.0f, 1.0f, 2.0f, 3.0f};
  std::uint32_t labels[4] = {0, 0, 1, 1};
  for (int i = 0; i < 4; ++i) m.push_row(&values[i], labels[i]);
  auto sel = anova_select(m, 1);
  CHECK(sel.f_scores[0] == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("constant features rank last; separated features rank first") {
  LabeledMatrix m;
  m.cols = 3;
  // col0 constant, col1 noisy, col2 perfectly separated
  const float rows[4][3] = {{1.0f, 0.3f, 0.0f},
                            {1.0f, 0.1f, 0.1f},
                            {1.0f, 0.2f, 10.0f},
                            {1.0f, 0.35f, 10.1f}};
  const std::uint32_t labels[4] = {0, 0, 1, 1};
  for (int i = 0; i < 4; ++i) m.push_row(rows[i], labels[i]);
  auto sel = anova_select(m, 3);
  CHECK(sel.indices.front() == 2);
  CHECK(sel.indices.back() == 0);
  CHECK(sel.f_scores.back() == doctest::Approx(0.0));
  CHECK(sel.f_scores.front() > 1e3);
}

TEST_CASE("anova F is shift and scale invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  LabeledMatrix base;
  base.cols = 1;
  for (int i = 0; i < 30; ++i) {
    float x = u(rng) + (i < 15 ? 0.0f : 1.0f);
    base.push_row(&x, i < 15 ? 0 : 1);
  }
  auto f0 = anova_select(base, 1).f_scores[0];

  LabeledMatrix shifted = base, scaled = base;
  for (auto& x : shifted.data) x += 100.0f;
  for (auto& x : scaled.data) x *= 3.0f;
  CHECK(anova_select(shifted, 1).f_scores[0] == doctest::Approx(f0).epsilon(1e-4));
  CHECK(anova_select(scaled, 1).f_scores[0] == doctest::Approx(f0).epsilon(1e-5));
}

TEST_CASE("apply_selector gathers in selector order") {
  AnovaSelector sel;
  sel.input_dim = 3;
  sel.indices = {2, 0};
  sel.f_scores = {5.0, 1.0};
  float row[3] = {10.0f, 20.0f, 30.0f};
  auto out = apply_selector(sel, row, 3);
  CHECK(out == std::vector<float>{30.0f, 10.0f});
  CHECK_THROWS_AS(apply_selector(sel, row, 2), Error);
}

TEST_CASE("selector and forest serialization round trip") {
  auto data = blob_data(30, 21);
  ForestConfig cfg;
  cfg.seed = 2;
  cfg.trees = 5;
  auto model = train_forest(data, cfg);
  auto restored = ForestModel::from_json(model.to_json());
  for (std::size_t i = 0; i < data.rows(); ++i)
    CHECK(forest_proba(restored, data.row(i), 2) == forest_proba(model, data.row(i), 2));

  auto sel = anova_select(data, 2);
  auto sel2 = AnovaSelector::from_json(sel.to_json());
  CHECK(sel2.indices == sel.indices);
  CHECK(sel2.input_dim == sel.input_dim);
}

}  // TEST_SUITE
