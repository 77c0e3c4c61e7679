#include <doctest.h>

#include <algorithm>
#include <random>

#include "hiertax/error.hpp"
#include "hiertax/featurize.hpp"

using namespace hiertax;

namespace {

// random table of `n` words "w0".."w{n-1}" with dimension d
WordVectorTable random_table(std::size_t n, std::uint32_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WordVectorTable t;
  t.dim = d;
  for (std::size_t i = 0; i < n; ++i) {
    t.index.emplace("w" + std::to_string(i), static_cast<std::uint32_t>(i));
    for (std::uint32_t j = 0; j < d; ++j) t.data.push_back(u(rng));
  }
  return t;
}

ClusterModel random_assignment(const WordVectorTable& table, std::uint32_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClusterModel m;
  m.k = k;
  m.dim = table.dim;
  m.centroids.assign(static_cast<std::size_t>(k) * table.dim, 0.0);
  for (const auto& [word, row] : table.index) m.assignment.emplace(word, rng() % k);
  return m;
}

IdfTable uniform_idf(const WordVectorTable& table, double value) {
  IdfTable idf;
  for (const auto& [word, row] : table.index) idf.idf[word] = value;
  return idf;
}

// naive per-(token, cluster) reimplementation used as the oracle
std::vector<double> gwbowv_oracle(const Document& doc, const ClusterModel& cluster,
                                  const IdfTable& idf, const WordVectorTable& table) {
  const std::size_t k = cluster.k, d = table.dim;
  std::vector<double> out(k * d + k, 0.0);
  for (std::uint32_t c = 0; c < k; ++c) {
    for (const auto& tok : doc.tokens) {
      if (!table.contains(tok) || !cluster.assignment.count(tok)) continue;
      if (cluster.assignment.at(tok) != c) continue;
      auto wv = table.vec(tok);
      for (std::size_t j = 0; j < d; ++j) out[c * d + j] += wv[j];
      out[k * d + c] += idf.lookup(tok);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("featurize") {

TEST_CASE("kmeans separates two tight groups") {
  WordVectorTable t;
  t.dim = 2;
  std::vector<std::pair<double, double>> pts = {
      {0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}, {10.0, 10.0}, {10.1, 10.0}, {10.0, 10.1}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.index.emplace("w" + std::to_string(i), static_cast<std::uint32_t>(i));
    t.data.push_back(pts[i].first);
    t.data.push_back(pts[i].second);
  }
  auto model = kmeans(t, 2, 42);
  CHECK(model.assignment.at("w0") == model.assignment.at("w1"));
  CHECK(model.assignment.at("w0") == model.assignment.at("w2"));
  CHECK(model.assignment.at("w3") == model.assignment.at("w4"));
  CHECK(model.assignment.at("w3") == model.assignment.at("w5"));
  CHECK(model.assignment.at("w0") != model.assignment.at("w3"));
}

TEST_CASE("kmeans with K=1 yields the mean") {
  auto t = random_table(20, 3, 1);
  auto model = kmeans(t, 1, 0);
  for (std::uint32_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 20; ++i) mean += t.data[i * 3 + j];
    mean /= 20.0;
    CHECK(model.centroids[j] == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("kmeans SSE is non-increasing per Lloyd iteration") {
  auto t = random_table(100, 4, 5);
  std::vector<double> sse;
  kmeans(t, 6, 7, 100, &sse);
  REQUIRE(sse.size() >= 2);
  for (std::size_t i = 1; i < sse.size(); ++i) CHECK(sse[i] <= sse[i - 1] + 1e-9);
}

TEST_CASE("kmeans rejects K > |V|") {
  auto t = random_table(3, 2, 0);
  CHECK_THROWS_AS(kmeans(t, 4, 0), Error);
}

TEST_CASE("kmeans is deterministic under a fixed seed") {
  auto t = random_table(50, 4, 9);
  auto a = kmeans(t, 5, 33);
  auto b = kmeans(t, 5, 33);
  CHECK(a.centroids == b.centroids);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("gwbowv single token occupies one block") {
  auto t = random_table(4, 3, 2);
  auto cluster = random_assignment(t, 2, 3);
  auto idf = uniform_idf(t, 1.5);
  Document doc{"d", {"w1"}, 0};
  auto v = gwbowv(doc, cluster, idf, t);
  REQUIRE(v.size() == 2 * 3 + 2);
  const auto c = cluster.assignment.at("w1");
  auto wv = t.vec("w1");
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(v[c * 3 + j] == doctest::Approx(wv[j]));
    CHECK(v[(1 - c) * 3 + j] == 0.0);
  }
  CHECK(v[6 + c] == doctest::Approx(1.5));
  CHECK(v[6 + (1 - c)] == 0.0);
}

TEST_CASE("gwbowv equals the brute-force oracle on random documents") {
  auto t = random_table(20, 4, 10);
  auto cluster = random_assignment(t, 3, 11);
  auto idf = uniform_idf(t, 2.0);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    Document doc{"d", {}, 0};
    for (int i = 0; i < 30; ++i) doc.tokens.push_back("w" + std::to_string(rng() % 25));  // some OOV
    auto got = gwbowv(doc, cluster, idf, t);
    auto want = gwbowv_oracle(doc, cluster, idf, t);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
}

TEST_CASE("gwbowv linearity and permutation invariance") {
  auto t = random_table(15, 3, 20);
  auto cluster = random_assignment(t, 4, 21);
  auto idf = uniform_idf(t, 1.2);
  Document a{"a", {"w0", "w1", "w2", "w3"}, 0};
  Document b{"b", {"w4", "w5", "w1"}, 0};
  Document ab{"ab", {}, 0};
  ab.tokens = a.tokens;
  ab.tokens.insert(ab.tokens.end(), b.tokens.begin(), b.tokens.end());
  auto va = gwbowv(a, cluster, idf, t);
  auto vb = gwbowv(b, cluster, idf, t);
  auto vab = gwbowv(ab, cluster, idf, t);
  for (std::size_t i = 0; i < vab.size(); ++i)
    CHECK(vab[i] == doctest::Approx(va[i] + vb[i]).epsilon(1e-12));

  Document shuffled = ab;
  std::reverse(shuffled.tokens.begin(), shuffled.tokens.end());
  auto vs = gwbowv(shuffled, cluster, idf, t);
  for (std::size_t i = 0; i < vab.size(); ++i)
    CHECK(vs[i] == doctest::Approx(vab[i]).epsilon(1e-12));
}

TEST_CASE("icf block with unit idf equals bocv") {
  auto t = random_table(12, 3, 30);
  auto cluster = random_assignment(t, 3, 31);
  auto idf = uniform_idf(t, 1.0);
  Document doc{"d", {"w0", "w0", "w3", "w7", "w7", "w7"}, 0};
  auto v = gwbowv(doc, cluster, idf, t);
  auto h = bocv(doc, cluster);
  for (std::uint32_t c = 0; c < 3; ++c)
    CHECK(v[3 * 3 + c] == doctest::Approx(h[c]).epsilon(1e-12));
}

TEST_CASE("gwbowv all-OOV document is flagged degenerate") {
  auto t = random_table(4, 2, 40);
  auto cluster = random_assignment(t, 2, 41);
  auto idf = uniform_idf(t, 1.0);
  Document doc{"d", {"missing", "also_missing"}, 0};
  bool degenerate = false;
  auto v = gwbowv(doc, cluster, idf, t, &degenerate);
  CHECK(degenerate);
  CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("awv examples") {
  auto t = random_table(5, 3, 50);
  Document one{"d", {"w2"}, 0};
  auto v = awv(one, t);
  auto wv = t.vec("w2");
  for (std::size_t j = 0; j < 3; ++j) CHECK(v[j] == doctest::Approx(wv[j]));

  WordVectorTable sym;
  sym.dim = 2;
  sym.index = {{"p", 0}, {"m", 1}};
  sym.data = {1.0, -2.0, -1.0, 2.0};
  auto zero = awv({"d", {"p", "m"}, 0}, sym);
  CHECK(zero[0] == doctest::Approx(0.0));
  CHECK(zero[1] == doctest::Approx(0.0));

  // brute-force mean oracle
  std::mt19937_64 rng(51);
  Document doc{"d", {}, 0};
  for (int i = 0; i < 10; ++i) doc.tokens.push_back("w" + std::to_string(rng() % 5));
  auto got = awv(doc, t);
  std::vector<double> want(3, 0.0);
  for (const auto& tok : doc.tokens) {
    auto w = t.vec(tok);
    for (std::size_t j = 0; j < 3; ++j) want[j] += w[j] / 10.0;
  }
  for (std::size_t j = 0; j < 3; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-9));
}

TEST_CASE("bocv counts sum to in-vocabulary token count") {
  auto t = random_table(10, 2, 60);
  auto cluster = random_assignment(t, 4, 61);
  Document doc{"d", {"w0", "w1", "w2", "oov", "w1"}, 0};
  auto h = bocv(doc, cluster);
  double sum = 0.0;
  for (double x : h) sum += x;
  CHECK(sum == doctest::Approx(4.0));
  CHECK(bocv({"d", {}, 0}, cluster) == std::vector<double>(4, 0.0));
}

TEST_CASE("tfidf weight is tf times idf over the top-m set") {
  std::vector<Document> docs = {
      {"d1", {"hard", "disk", "hard", "disk"}, 0},
      {"d2", {"hard", "case"}, 0},
      {"d3", {"case"}, 0},
  };
  auto model = build_tfidf_model(docs, 50);
  REQUIRE(model.index.count("hard"));
  const auto idx = model.index.at("hard");
  Document doc{"q", {"hard", "hard"}, 0};
  auto v = tfidf_vector(doc, model);
  CHECK(v.at(idx) == doctest::Approx(2.0 * model.idf[idx]).epsilon(1e-12));

  Document none{"q", {"unseen"}, 0};
  CHECK(tfidf_vector(none, model).empty());
}

TEST_CASE("tfidf counts adjacent bigrams") {
  std::vector<Document> docs = {{"d1", {"hard", "disk"}, 0}, {"d2", {"hard", "disk"}, 0}};
  auto model = build_tfidf_model(docs, 50);
  REQUIRE(model.index.count("hard disk"));
  Document doc{"q", {"hard", "disk", "hard"}, 0};
  auto v = tfidf_vector(doc, model);
  // sliding-window oracle: exactly one "hard disk" bigram
  CHECK(v.at(model.index.at("hard disk")) ==
        doctest::Approx(model.idf[model.index.at("hard disk")]));
}

TEST_CASE("tfidf dimension cap takes the most frequent features") {
  std::vector<Document> docs = {
      {"d1", {"common", "common", "common", "rare"}, 0},
      {"d2", {"common"}, 0},
  };
  auto model = build_tfidf_model(docs, 1);
  REQUIRE(model.size() == 1);
  CHECK(model.features[0] == "common");
}

TEST_CASE("cluster model serialization round trip") {
  auto t = random_table(8, 2, 70);
  auto model = kmeans(t, 3, 71);
  auto restored = ClusterModel::from_json(model.to_json());
  CHECK(restored.k == model.k);
  CHECK(restored.assignment == model.assignment);
  CHECK(restored.centroids == model.centroids);
}

}  // TEST_SUITE
