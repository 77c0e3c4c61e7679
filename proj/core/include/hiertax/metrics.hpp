#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hiertax/taxonomy.hpp"

namespace hiertax {

// Ranked (path, probability) pairs, descending probability, PathId tiebreak.
using PredictionList = std::vector<std::pair<PathId, double>>;

struct EvalCase {
  PathId truth = 0;
  PredictionList predictions;
};

struct MetricRow {
  std::size_t k = 0;
  double pp = 0.0;  // probability precision
  double cp = 0.0;  // count precision
  double lr = 0.0;  // label recall
  double lc = 0.0;  // label correlation
};

struct EvalResult {
  std::vector<MetricRow> rows;
  std::size_t n_cases = 0;
};

// p(truth) / sum of returned probabilities; 0 when truth is absent or the
// returned mass is zero.
double pp_at_k(const EvalCase& c, std::size_t k);

// 1 iff the true path is among the top k.
double cp_at_k(const EvalCase& c, std::size_t k);

// |true nodes covered by any predicted path| / |true nodes|.
double lr_at_k(const EvalCase& c, std::size_t k, const TaxonomyTree& taxonomy);

// |intersection| / |union| over the k predicted paths' node sets.
double lc_at_k(const EvalCase& c, std::size_t k, const TaxonomyTree& taxonomy);

EvalResult evaluate(const std::vector<EvalCase>& cases, const TaxonomyTree& taxonomy,
                    const std::vector<std::size_t>& ks = {1, 3, 6});

std::string eval_result_csv(const EvalResult& result);
std::string eval_result_table(const EvalResult& result);

}  // namespace hiertax
