#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "hiertax/corpus.hpp"
#include "hiertax/featurize.hpp"
#include "hiertax/learners.hpp"

using namespace hiertax;

namespace {

WordVectorTable random_table(std::size_t words, std::uint32_t dim, std::uint64_t seed) {
  WordVectorTable t;
  t.dim = dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t w = 0; w < words; ++w) {
    t.index["w" + std::to_string(w)] = static_cast<std::uint32_t>(w);
    for (std::uint32_t j = 0; j < dim; ++j) t.data.push_back(u(rng));
  }
  return t;
}

Document random_doc(std::size_t vocab, std::size_t tokens, std::uint64_t seed) {
  Document d;
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < tokens; ++t)
    d.tokens.push_back("w" + std::to_string(rng() % vocab));
  return d;
}

}  // namespace

static void BM_Gwbowv(benchmark::State& state) {
  const auto words = static_cast<std::size_t>(state.range(0));
  auto table = random_table(words, 50, 1);
  auto cluster = kmeans(table, 10, 2);
  IdfTable idf;
  for (const auto& [w, i] : table.index) idf.idf[w] = 1.5;
  auto doc = random_doc(words, 40, 3);
  for (auto _ : state) benchmark::DoNotOptimize(gwbowv(doc, cluster, idf, table));
}
BENCHMARK(BM_Gwbowv)->Arg(500)->Arg(5000);

static void BM_KmeansIteration(benchmark::State& state) {
  const auto words = static_cast<std::size_t>(state.range(0));
  auto table = random_table(words, 50, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(table, 10, 5, 1));
}
BENCHMARK(BM_KmeansIteration)->Arg(500)->Arg(2000);

static void BM_ForestPredict(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  LabeledMatrix m;
  m.cols = 32;
  std::vector<float> row(m.cols);
  for (int i = 0; i < 400; ++i) {
    const std::uint32_t label = i % 4;
    for (auto& x : row) x = noise(rng) + 3.0f * static_cast<float>(label);
    m.push_row(row.data(), label);
  }
  ForestConfig cfg;
  cfg.trees = 20;
  cfg.seed = 7;
  auto model = train_forest(m, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest_proba(model, m.row(i), m.cols));
    i = (i + 1) % m.rows();
  }
}
BENCHMARK(BM_ForestPredict);

BENCHMARK_MAIN();
