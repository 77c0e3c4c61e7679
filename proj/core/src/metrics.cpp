#include "hiertax/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "hiertax/error.hpp"

namespace hiertax {

namespace {
std::size_t top(const EvalCase& c, std::size_t k) { return std::min(k, c.predictions.size()); }
}  // namespace

double pp_at_k(const EvalCase& c, std::size_t k) {
  const std::size_t n = top(c, k);
  double denom = 0.0, truth_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    denom += c.predictions[i].second;
    if (c.predictions[i].first == c.truth) truth_p = c.predictions[i].second;
  }
  if (denom <= 0.0) return 0.0;
  return truth_p / denom;
}

double cp_at_k(const EvalCase& c, std::size_t k) {
  const std::size_t n = top(c, k);
  for (std::size_t i = 0; i < n; ++i)
    if (c.predictions[i].first == c.truth) return 1.0;
  return 0.0;
}

double lr_at_k(const EvalCase& c, std::size_t k, const TaxonomyTree& taxonomy) {
  const auto& truth_nodes = taxonomy.path_nodes(c.truth);
  std::set<NodeId> truth(truth_nodes.begin(), truth_nodes.end());
  std::set<NodeId> predicted;
  const std::size_t n = top(c, k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nodes = taxonomy.path_nodes(c.predictions[i].first);
    predicted.insert(nodes.begin(), nodes.end());
  }
  std::size_t hit = 0;
  for (NodeId t : truth)
    if (predicted.count(t)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double lc_at_k(const EvalCase& c, std::size_t k, const TaxonomyTree& taxonomy) {
  const std::size_t n = top(c, k);
  if (n == 0) return 0.0;
  std::set<NodeId> inter, uni;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nodes = taxonomy.path_nodes(c.predictions[i].first);
    std::set<NodeId> cur(nodes.begin(), nodes.end());
    if (i == 0) {
      inter = cur;
    } else {
      std::set<NodeId> keep;
      for (NodeId x : inter)
        if (cur.count(x)) keep.insert(x);
      inter = std::move(keep);
    }
    uni.insert(cur.begin(), cur.end());
  }
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

EvalResult evaluate(const std::vector<EvalCase>& cases, const TaxonomyTree& taxonomy,
                    const std::vector<std::size_t>& ks) {
  if (cases.empty()) throw Error("empty_cases", "evaluate needs at least one case");
  EvalResult result;
  result.n_cases = cases.size();
  for (std::size_t k : ks) {
    MetricRow row;
    row.k = k;
    for (const auto& c : cases) {
      row.pp += pp_at_k(c, k);
      row.cp += cp_at_k(c, k);
      row.lr += lr_at_k(c, k, taxonomy);
      row.lc += lc_at_k(c, k, taxonomy);
    }
    const double n = static_cast<double>(cases.size());
    row.pp /= n;
    row.cp /= n;
    row.lr /= n;
    row.lc /= n;
    result.rows.push_back(row);
  }
  return result;
}

std::string eval_result_csv(const EvalResult& result) {
  std::ostringstream out;
  out << "metric,k,value,n_cases\n";
  char buf[64];
  auto emit = [&](const char* name, std::size_t k, double v) {
    std::snprintf(buf, sizeof(buf), "%.*g", 17, v);
    out << name << ',' << k << ',' << buf << ',' << result.n_cases << '\n';
  };
  for (const auto& row : result.rows) {
    emit("pp", row.k, row.pp);
    emit("cp", row.k, row.cp);
    emit("lr", row.k, row.lr);
    emit("lc", row.k, row.lc);
  }
  return out.str();
}

std::string eval_result_table(const EvalResult& result) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%6s %10s %10s %10s %10s\n", "K", "PP@K", "CP@K", "LR@K",
                "LC@K");
  out << line;
  for (const auto& row : result.rows) {
    std::snprintf(line, sizeof(line), "%6zu %10.4f %10.4f %10.4f %10.4f\n", row.k, row.pp, row.cp,
                  row.lr, row.lc);
    out << line;
  }
  std::snprintf(line, sizeof(line), "n_cases = %zu\n", result.n_cases);
  out << line;
  return out.str();
}

}  // namespace hiertax
