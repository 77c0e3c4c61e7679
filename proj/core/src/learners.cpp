#include "hiertax/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <atomic>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"
#include "hiertax/seeds.hpp"

namespace hiertax {

using json = nlohmann::json;

namespace {

struct TreeBuilder {
  const LabeledMatrix& data;
  const std::vector<std::uint32_t>& class_index;  // dense label -> class idx
  std::size_t n_classes;
  const ForestConfig& config;
  std::mt19937_64 rng;
  Tree tree;
  std::size_t n_candidates;

  // indices into data rows for the current node, reordered in place
  std::vector<std::uint32_t> sample;

  double gini(const std::vector<std::uint32_t>& counts, std::size_t total) const {
    double g = 1.0;
    for (std::uint32_t c : counts) {
      const double p = static_cast<double>(c) / static_cast<double>(total);
      g -= p * p;
    }
    return g;
  }

  std::int32_t build(std::size_t lo, std::size_t hi, int depth) {
    std::vector<std::uint32_t> counts(n_classes, 0);
    for (std::size_t i = lo; i < hi; ++i) ++counts[class_index[data.labels[sample[i]]]];
    const std::size_t total = hi - lo;

    const bool pure = *std::max_element(counts.begin(), counts.end()) == total;
    const bool depth_stop = config.max_depth >= 0 && depth >= config.max_depth;
    if (pure || depth_stop || total < 2 * static_cast<std::size_t>(config.min_samples_leaf) ||
        total < 2)
      return make_leaf(counts, total);

    // candidate features, sampled without replacement
    std::vector<std::uint32_t> feats(data.cols);
    std::iota(feats.begin(), feats.end(), 0);
    for (std::size_t i = 0; i < n_candidates; ++i) {
      std::size_t j = i + rng() % (feats.size() - i);
      std::swap(feats[i], feats[j]);
    }

    double best_impurity = std::numeric_limits<double>::max();
    std::uint32_t best_feat = 0;
    float best_thresh = 0.0f;
    std::vector<std::pair<float, std::uint32_t>> vals(total);

    for (std::size_t f = 0; f < n_candidates; ++f) {
      const std::uint32_t feat = feats[f];
      for (std::size_t i = 0; i < total; ++i) {
        const std::uint32_t r = sample[lo + i];
        vals[i] = {data.row(r)[feat], class_index[data.labels[r]]};
      }
      std::sort(vals.begin(), vals.end());
      std::vector<std::uint32_t> left(n_classes, 0);
      std::vector<std::uint32_t> right = counts;
      for (std::size_t i = 0; i + 1 < total; ++i) {
        ++left[vals[i].second];
        --right[vals[i].second];
        if (vals[i].first == vals[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = total - nl;
        if (nl < static_cast<std::size_t>(config.min_samples_leaf) ||
            nr < static_cast<std::size_t>(config.min_samples_leaf))
          continue;
        const double impurity = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feat = feat;
          best_thresh = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0f;
          if (best_thresh <= vals[i].first) best_thresh = vals[i].first;  // float midpoint collapse
        }
      }
    }

    if (best_impurity == std::numeric_limits<double>::max()) return make_leaf(counts, total);

    auto mid_it = std::partition(sample.begin() + lo, sample.begin() + hi, [&](std::uint32_t r) {
      return data.row(r)[best_feat] <= best_thresh;
    });
    const std::size_t mid = static_cast<std::size_t>(mid_it - sample.begin());
    if (mid == lo || mid == hi) return make_leaf(counts, total);

    const std::int32_t id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].feature = best_feat;
    tree.nodes[id].threshold = best_thresh;
    const std::int32_t l = build(lo, mid, depth + 1);
    const std::int32_t r = build(mid, hi, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  std::int32_t make_leaf(const std::vector<std::uint32_t>& counts, std::size_t total) {
    const std::int32_t id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto& dist = tree.nodes[id].distribution;
    dist.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
      dist[c] = static_cast<float>(counts[c]) / static_cast<float>(total);
    return id;
  }
};

const std::vector<float>& tree_leaf(const Tree& tree, const float* row) {
  std::int32_t cur = 0;
  while (!tree.nodes[cur].is_leaf())
    cur = row[tree.nodes[cur].feature] <= tree.nodes[cur].threshold ? tree.nodes[cur].left
                                                                    : tree.nodes[cur].right;
  return tree.nodes[cur].distribution;
}

}  // namespace

ForestModel train_forest(const LabeledMatrix& data, const ForestConfig& config) {
  if (data.rows() == 0) throw Error("empty_data", "forest training needs rows");
  if (config.trees < 1) throw Error("bad_config", "tree count must be >= 1");

  std::set<std::uint32_t> labels(data.labels.begin(), data.labels.end());
  if (labels.size() < 2) throw Error("degenerate_labels", "training data has a single class");

  ForestModel model;
  model.classes.assign(labels.begin(), labels.end());
  model.input_dim = data.cols;

  std::vector<std::uint32_t> class_index(*labels.rbegin() + 1, 0);
  for (std::uint32_t i = 0; i < model.classes.size(); ++i) class_index[model.classes[i]] = i;

  const std::size_t n = data.rows();
  const auto n_candidates = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(data.cols),
                       std::ceil(std::sqrt(static_cast<double>(data.cols)))));

  model.trees.resize(config.trees);
  auto build_tree = [&](int t) {
    // per-tree RNG derived from the master seed keeps trees independent, so
    // results match between serial and parallel training
    TreeBuilder builder{data, class_index, model.classes.size(), config,
                        std::mt19937_64(derive_seed(config.seed, "tree/" + std::to_string(t))),
                        Tree{}, n_candidates, {}};
    builder.sample.resize(n);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i)
        builder.sample[i] = static_cast<std::uint32_t>(builder.rng() % n);
    } else {
      std::iota(builder.sample.begin(), builder.sample.end(), 0);
    }
    builder.build(0, n, 0);
    model.trees[t] = std::move(builder.tree);
  };
  if (config.workers > 1) {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int nthreads = std::min(config.workers, config.trees);
    for (int w = 0; w < nthreads; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < config.trees; t = next.fetch_add(1)) build_tree(t);
      });
    for (auto& th : pool) th.join();
  } else {
    for (int t = 0; t < config.trees; ++t) build_tree(t);
  }
  return model;
}

std::vector<double> forest_proba(const ForestModel& model, const float* row, std::size_t dim) {
  if (dim != model.input_dim) throw Error("dim_mismatch", "row dimension != model input dimension");
  std::vector<double> out(model.classes.size(), 0.0);
  for (const auto& tree : model.trees) {
    const auto& dist = tree_leaf(tree, row);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += dist[c];
  }
  for (auto& x : out) x /= static_cast<double>(model.trees.size());
  return out;
}

KnnModel train_knn(const LabeledMatrix& data, std::size_t k_neighbors) {
  if (k_neighbors == 0 || k_neighbors > data.rows())
    throw Error("bad_config", "k_neighbors must be in [1, n]");
  KnnModel model;
  model.k_neighbors = k_neighbors;
  model.data = data;
  std::set<std::uint32_t> labels(data.labels.begin(), data.labels.end());
  model.classes.assign(labels.begin(), labels.end());
  return model;
}

std::vector<double> knn_proba(const KnnModel& model, const float* row, std::size_t dim) {
  if (dim != model.data.cols) throw Error("dim_mismatch", "row dimension != training dimension");
  const std::size_t n = model.data.rows();
  std::vector<std::pair<double, std::uint32_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const float* x = model.data.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = static_cast<double>(x[j]) - row[j];
      s += diff * diff;
    }
    dist[i] = {std::sqrt(s), static_cast<std::uint32_t>(i)};
  }
  std::sort(dist.begin(), dist.end());  // ties fall back to lower row index

  std::vector<std::uint32_t> class_index(model.classes.back() + 1, 0);
  for (std::uint32_t i = 0; i < model.classes.size(); ++i) class_index[model.classes[i]] = i;

  std::vector<double> out(model.classes.size(), 0.0);
  bool exact = false;
  for (std::size_t i = 0; i < model.k_neighbors; ++i)
    if (dist[i].first == 0.0) exact = true;
  double total = 0.0;
  for (std::size_t i = 0; i < model.k_neighbors; ++i) {
    const auto cls = class_index[model.data.labels[dist[i].second]];
    const double w = exact ? (dist[i].first == 0.0 ? 1.0 : 0.0) : 1.0 / dist[i].first;
    out[cls] += w;
    total += w;
  }
  for (auto& x : out) x /= total;
  return out;
}

AnovaSelector anova_select(const LabeledMatrix& data, std::size_t m_out) {
  const std::size_t n = data.rows();
  const std::size_t m = data.cols;
  if (m_out > m) throw Error("bad_config", "m_out exceeds feature count");
  std::set<std::uint32_t> labels(data.labels.begin(), data.labels.end());
  const std::size_t c = labels.size();
  if (c < 2) throw Error("degenerate_labels", "ANOVA needs >= 2 classes");
  if (n <= c) throw Error("bad_config", "ANOVA needs n > c");

  std::vector<std::uint32_t> class_index(*labels.rbegin() + 1, 0);
  {
    std::uint32_t i = 0;
    for (std::uint32_t l : labels) class_index[l] = i++;
  }
  std::vector<std::size_t> group_n(c, 0);
  for (std::uint32_t l : data.labels) ++group_n[class_index[l]];

  constexpr double kEps = 1e-12;
  std::vector<double> f_all(m, 0.0);
  std::vector<double> group_sum(c);
  for (std::size_t feat = 0; feat < m; ++feat) {
    std::fill(group_sum.begin(), group_sum.end(), 0.0);
    double total_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = data.row(i)[feat];
      group_sum[class_index[data.labels[i]]] += x;
      total_sum += x;
    }
    const double mean = total_sum / static_cast<double>(n);
    double ssb = 0.0;
    for (std::size_t g = 0; g < c; ++g) {
      const double gm = group_sum[g] / static_cast<double>(group_n[g]);
      ssb += static_cast<double>(group_n[g]) * (gm - mean) * (gm - mean);
    }
    double ssw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gm = group_sum[class_index[data.labels[i]]] /
                        static_cast<double>(group_n[class_index[data.labels[i]]]);
      const double diff = data.row(i)[feat] - gm;
      ssw += diff * diff;
    }
    f_all[feat] = (ssb / static_cast<double>(c - 1)) /
                  ((ssw + kEps) / static_cast<double>(n - c));
  }

  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (f_all[a] != f_all[b]) return f_all[a] > f_all[b];
    return a < b;
  });

  AnovaSelector sel;
  sel.input_dim = m;
  sel.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m_out));
  for (std::uint32_t idx : sel.indices) sel.f_scores.push_back(f_all[idx]);
  return sel;
}

std::vector<float> apply_selector(const AnovaSelector& selector, const float* row,
                                  std::size_t dim) {
  if (dim != selector.input_dim) throw Error("dim_mismatch", "row dimension != selector input");
  std::vector<float> out;
  out.reserve(selector.indices.size());
  for (std::uint32_t idx : selector.indices) out.push_back(row[idx]);
  return out;
}

std::string ForestModel::to_json() const {
  json j;
  j["format_version"] = 1;
  j["classes"] = classes;
  j["input_dim"] = input_dim;
  json trees_json = json::array();
  for (const auto& tree : trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      json e;
      e["f"] = n.feature;
      e["t"] = n.threshold;
      e["l"] = n.left;
      e["r"] = n.right;
      if (n.is_leaf()) e["d"] = n.distribution;
      nodes.push_back(e);
    }
    trees_json.push_back(nodes);
  }
  j["trees"] = trees_json;
  return j.dump();
}

ForestModel ForestModel::from_json(const std::string& text) {
  ForestModel model;
  try {
    json j = json::parse(text);
    model.classes = j.at("classes").get<std::vector<std::uint32_t>>();
    model.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& tj : j.at("trees")) {
      Tree tree;
      for (const auto& e : tj) {
        TreeNode n;
        n.feature = e.at("f").get<std::uint32_t>();
        n.threshold = e.at("t").get<float>();
        n.left = e.at("l").get<std::int32_t>();
        n.right = e.at("r").get<std::int32_t>();
        if (e.contains("d")) n.distribution = e.at("d").get<std::vector<float>>();
        tree.nodes.push_back(std::move(n));
      }
      model.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw Error("model_parse_error", e.what());
  }
  return model;
}

std::string AnovaSelector::to_json() const {
  json j;
  j["format_version"] = 1;
  j["input_dim"] = input_dim;
  j["indices"] = indices;
  j["f_scores"] = f_scores;
  return j.dump();
}

AnovaSelector AnovaSelector::from_json(const std::string& text) {
  AnovaSelector sel;
  try {
    json j = json::parse(text);
    sel.input_dim = j.at("input_dim").get<std::size_t>();
    sel.indices = j.at("indices").get<std::vector<std::uint32_t>>();
    sel.f_scores = j.at("f_scores").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error("selector_parse_error", e.what());
  }
  return sel;
}

}  // namespace hiertax
