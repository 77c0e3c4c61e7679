#include "hiertax/syngen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hiertax/error.hpp"
#include "hiertax/seeds.hpp"

namespace hiertax {

namespace {

struct SynthNode {
  std::string name;
  int parent = -1;
  std::vector<int> children;
  std::vector<std::string> vocab;
};

}  // namespace

SynthConfig plant_confusion(SynthConfig config, int leaf_a, int leaf_b, double overlap) {
  if (leaf_a == leaf_b) throw Error("bad_config", "confusion pair needs two distinct leaves");
  if (overlap < 0.0 || overlap > 1.0) throw Error("bad_config", "overlap must be in [0,1]");
  config.confusion_pair = {leaf_a, leaf_b};
  config.confusion_overlap = overlap;
  return config;
}

SynthResult generate(const SynthConfig& config) {
  if (config.branching.empty() || config.words_per_node < 1 || config.docs_per_leaf < 1 ||
      config.min_tokens < 1 || config.max_tokens < config.min_tokens ||
      config.topic_fraction <= 0.0 || config.topic_fraction > 1.0)
    throw Error("bad_config", "invalid synthetic corpus configuration");

  // build the tree level by level
  std::vector<SynthNode> nodes;
  std::vector<int> frontier{-1};  // virtual root
  for (std::size_t level = 0; level < config.branching.size(); ++level) {
    std::vector<int> next;
    for (int parent : frontier) {
      for (int c = 0; c < config.branching[level]; ++c) {
        SynthNode n;
        n.parent = parent;
        n.name = "cat" + std::to_string(level + 1) + "_" + std::to_string(nodes.size());
        int id = static_cast<int>(nodes.size());
        nodes.push_back(n);
        if (parent >= 0) nodes[parent].children.push_back(id);
        next.push_back(id);
      }
    }
    frontier = std::move(next);
  }
  const std::vector<int>& leaves = frontier;

  // per-node topic vocabularies, disjoint by construction
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (int w = 0; w < config.words_per_node; ++w)
      nodes[i].vocab.push_back("topic" + std::to_string(i) + "w" + std::to_string(w));

  if (config.confusion_pair) {
    auto [a, b] = *config.confusion_pair;
    if (a < 0 || b < 0 || a >= static_cast<int>(leaves.size()) ||
        b >= static_cast<int>(leaves.size()))
      throw Error("bad_config", "confusion pair leaf index out of range");
    auto& va = nodes[leaves[a]].vocab;
    auto& vb = nodes[leaves[b]].vocab;
    const auto shared = static_cast<std::size_t>(std::round(config.confusion_overlap * va.size()));
    for (std::size_t i = 0; i < shared && i < vb.size(); ++i) vb[i] = va[i];
  }

  std::vector<std::string> noise;
  for (int w = 0; w < config.noise_vocab; ++w) noise.push_back("noise" + std::to_string(w));

  SynthResult result;
  std::mt19937_64 rng(derive_seed(config.seed, "syngen"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t li = 0; li < leaves.size(); ++li) {
    // path and pooled ancestor vocabulary
    std::vector<std::string> path;
    std::vector<const std::vector<std::string>*> path_vocabs;
    int cur = leaves[li];
    while (cur >= 0) {
      path.push_back(nodes[cur].name);
      path_vocabs.push_back(&nodes[cur].vocab);
      cur = nodes[cur].parent;
    }
    std::reverse(path.begin(), path.end());
    std::reverse(path_vocabs.begin(), path_vocabs.end());
    result.paths.push_back(path);

    const auto rank = static_cast<double>(li + 1);
    const auto doc_count = static_cast<int>(
        std::ceil(config.docs_per_leaf / std::pow(rank, config.skew)));

    const auto& leaf_vocab = *path_vocabs.back();
    for (int d = 0; d < doc_count; ++d) {
      RawRecord rec;
      rec.id = "doc" + std::to_string(result.records.size());
      rec.path = path;

      const int n_tokens = config.min_tokens +
                           static_cast<int>(rng() % static_cast<std::uint64_t>(
                                                config.max_tokens - config.min_tokens + 1));
      std::vector<std::string> tokens;
      for (int t = 0; t < n_tokens; ++t) {
        if (unit(rng) < config.topic_fraction) {
          // leaf-heavy mix over the path vocabularies
          const std::size_t pv =
              unit(rng) < 0.5 ? path_vocabs.size() - 1 : rng() % path_vocabs.size();
          const auto& vocab = *path_vocabs[pv];
          tokens.push_back(vocab[rng() % vocab.size()]);
        } else {
          tokens.push_back(noise[rng() % noise.size()]);
        }
      }
      // title: a few leaf topic words
      std::string title;
      for (int t = 0; t < 3; ++t) {
        if (t) title += ' ';
        title += leaf_vocab[rng() % leaf_vocab.size()];
      }
      std::string description;
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (t) description += ' ';
        description += tokens[t];
      }
      rec.title = std::move(title);
      rec.description = std::move(description);
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace hiertax
