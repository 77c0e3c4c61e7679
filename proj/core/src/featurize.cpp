#include "hiertax/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"
#include "hiertax/seeds.hpp"

namespace hiertax {

using json = nlohmann::json;

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

std::uint32_t ClusterModel::cluster_of(const std::string& word) const {
  auto it = assignment.find(word);
  if (it == assignment.end()) throw Error("unknown_word", word);
  return it->second;
}

ClusterModel kmeans(const WordVectorTable& table, std::uint32_t k, std::uint64_t seed,
                    int max_iters, std::vector<double>* sse_per_iter) {
  const std::size_t n = table.size();
  const std::size_t d = table.dim;
  if (k < 1) throw Error("bad_config", "k must be >= 1");
  if (k > n) throw Error("bad_config", "k exceeds vocabulary size");

  // stable row order for determinism
  std::vector<const std::string*> words(n);
  for (const auto& [word, row] : table.index) words[row] = &word;

  std::mt19937_64 rng(mix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding
  std::vector<double> centroids(static_cast<std::size_t>(k) * d);
  std::vector<double> min_dist(n, std::numeric_limits<double>::max());
  {
    std::size_t first = static_cast<std::size_t>(unit(rng) * n);
    if (first >= n) first = n - 1;
    std::copy_n(table.data.data() + first * d, d, centroids.data());
    for (std::uint32_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dist = sq_dist(table.data.data() + i * d,
                                    centroids.data() + (c - 1) * d, d);
        min_dist[i] = std::min(min_dist[i], dist);
        total += min_dist[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        double target = unit(rng) * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += min_dist[i];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<std::size_t>(unit(rng) * n);
        if (pick >= n) pick = n - 1;
      }
      std::copy_n(table.data.data() + pick * d, d, centroids.data() + c * d);
    }
  }

  std::vector<std::uint32_t> assign(n, 0);
  std::vector<std::uint32_t> prev_assign(n, k);  // force first-iteration change
  if (sse_per_iter) sse_per_iter->clear();

  for (int iter = 0; iter < max_iters; ++iter) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      std::uint32_t best_c = 0;
      for (std::uint32_t c = 0; c < k; ++c) {
        const double dist = sq_dist(table.data.data() + i * d, centroids.data() + c * d, d);
        if (dist < best) {
          best = dist;
          best_c = c;
        }
      }
      assign[i] = best_c;
      sse += best;
    }
    if (sse_per_iter) sse_per_iter->push_back(sse);
    if (assign == prev_assign) break;
    prev_assign = assign;

    std::vector<double> sums(static_cast<std::size_t>(k) * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* row = sums.data() + static_cast<std::size_t>(assign[i]) * d;
      const double* x = table.data.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += x[j];
      ++counts[assign[i]];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // re-seed from the point farthest from its current centroid
        double worst = -1.0;
        std::size_t far = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dist = sq_dist(table.data.data() + i * d,
                                      centroids.data() + static_cast<std::size_t>(assign[i]) * d, d);
          if (dist > worst) {
            worst = dist;
            far = i;
          }
        }
        std::copy_n(table.data.data() + far * d, d, centroids.data() + static_cast<std::size_t>(c) * d);
      } else {
        double* cen = centroids.data() + static_cast<std::size_t>(c) * d;
        const double* row = sums.data() + static_cast<std::size_t>(c) * d;
        for (std::size_t j = 0; j < d; ++j) cen[j] = row[j] / static_cast<double>(counts[c]);
      }
    }
  }

  ClusterModel model;
  model.k = k;
  model.dim = static_cast<std::uint32_t>(d);
  model.centroids = std::move(centroids);
  for (std::size_t i = 0; i < n; ++i) model.assignment.emplace(*words[i], assign[i]);
  return model;
}

std::vector<double> gwbowv(const Document& doc, const ClusterModel& cluster, const IdfTable& idf,
                           const WordVectorTable& table, bool* degenerate) {
  const std::size_t k = cluster.k;
  const std::size_t d = table.dim;
  std::vector<double> out(k * d + k, 0.0);
  bool any = false;
  for (const auto& tok : doc.tokens) {
    auto it = table.index.find(tok);
    if (it == table.index.end()) continue;
    auto ait = cluster.assignment.find(tok);
    if (ait == cluster.assignment.end()) continue;
    any = true;
    const std::uint32_t c = ait->second;
    auto wv = table.vec(it->second);
    double* cv = out.data() + static_cast<std::size_t>(c) * d;
    for (std::size_t j = 0; j < d; ++j) cv[j] += wv[j];
    out[k * d + c] += idf.lookup(tok);
  }
  if (degenerate) *degenerate = !any;
  return out;
}

std::vector<double> awv(const Document& doc, const WordVectorTable& table) {
  std::vector<double> out(table.dim, 0.0);
  std::size_t count = 0;
  for (const auto& tok : doc.tokens) {
    auto it = table.index.find(tok);
    if (it == table.index.end()) continue;
    auto wv = table.vec(it->second);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += wv[j];
    ++count;
  }
  if (count > 0)
    for (auto& x : out) x /= static_cast<double>(count);
  return out;
}

std::vector<double> bocv(const Document& doc, const ClusterModel& cluster) {
  std::vector<double> out(cluster.k, 0.0);
  for (const auto& tok : doc.tokens) {
    auto it = cluster.assignment.find(tok);
    if (it != cluster.assignment.end()) out[it->second] += 1.0;
  }
  return out;
}

TfidfModel build_tfidf_model(const std::vector<Document>& documents, std::size_t m) {
  if (documents.empty()) throw Error("empty_corpus", "tf-idf model needs documents");
  std::unordered_map<std::string, std::uint64_t> tf;
  std::unordered_map<std::string, std::uint32_t> df;
  std::vector<std::string> order;
  for (const auto& doc : documents) {
    std::unordered_set<std::string> seen;
    auto bump = [&](const std::string& feat) {
      auto [it, inserted] = tf.emplace(feat, 0);
      if (inserted) order.push_back(feat);
      ++it->second;
      seen.insert(feat);
    };
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      bump(doc.tokens[i]);
      if (i + 1 < doc.tokens.size()) bump(doc.tokens[i] + ' ' + doc.tokens[i + 1]);
    }
    for (const auto& feat : seen) ++df[feat];
  }
  // rank by corpus frequency, first-seen tiebreak
  std::vector<std::uint32_t> idx(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return tf[order[a]] > tf[order[b]];
  });
  TfidfModel model;
  const double n = static_cast<double>(documents.size());
  const std::size_t keep = std::min(m, order.size());
  for (std::size_t r = 0; r < keep; ++r) {
    const std::string& feat = order[idx[r]];
    model.index.emplace(feat, static_cast<std::uint32_t>(model.features.size()));
    model.features.push_back(feat);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + df[feat])) + 1.0);
  }
  return model;
}

std::map<std::uint32_t, double> tfidf_vector(const Document& doc, const TfidfModel& model) {
  std::map<std::uint32_t, double> out;
  auto add = [&](const std::string& feat) {
    auto it = model.index.find(feat);
    if (it != model.index.end()) out[it->second] += model.idf[it->second];
  };
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    add(doc.tokens[i]);
    if (i + 1 < doc.tokens.size()) add(doc.tokens[i] + ' ' + doc.tokens[i + 1]);
  }
  return out;
}

std::string ClusterModel::to_json() const {
  json j;
  j["format_version"] = 1;
  j["k"] = k;
  j["dim"] = dim;
  j["centroids"] = centroids;
  std::map<std::string, std::uint32_t> sorted(assignment.begin(), assignment.end());
  j["assignment"] = sorted;
  return j.dump();
}

ClusterModel ClusterModel::from_json(const std::string& text) {
  ClusterModel model;
  try {
    json j = json::parse(text);
    model.k = j.at("k").get<std::uint32_t>();
    model.dim = j.at("dim").get<std::uint32_t>();
    model.centroids = j.at("centroids").get<std::vector<double>>();
    for (auto& [word, c] : j.at("assignment").items())
      model.assignment.emplace(word, c.get<std::uint32_t>());
  } catch (const json::exception& e) {
    throw Error("cluster_parse_error", e.what());
  }
  return model;
}

std::string TfidfModel::to_json() const {
  json j;
  j["format_version"] = 1;
  j["features"] = features;
  j["idf"] = idf;
  return j.dump();
}

TfidfModel TfidfModel::from_json(const std::string& text) {
  TfidfModel model;
  try {
    json j = json::parse(text);
    model.features = j.at("features").get<std::vector<std::string>>();
    model.idf = j.at("idf").get<std::vector<double>>();
    for (std::uint32_t i = 0; i < model.features.size(); ++i)
      model.index.emplace(model.features[i], i);
  } catch (const json::exception& e) {
    throw Error("tfidf_parse_error", e.what());
  }
  return model;
}

}  // namespace hiertax
