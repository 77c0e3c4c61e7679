#include "hiertax/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "hiertax/error.hpp"
#include "hiertax/io.hpp"
#include "hiertax/seeds.hpp"

namespace hiertax {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::span<const double> WordVectorTable::vec(const std::string& word) const {
  auto it = index.find(word);
  if (it == index.end()) throw Error("unknown_word", word);
  return vec(it->second);
}

double sgns_pair_loss(std::span<const double> center, std::span<const double> positive,
                      const std::vector<std::vector<double>>& negatives) {
  double loss = -std::log(sigmoid(dot(center, positive)));
  for (const auto& neg : negatives) loss -= std::log(sigmoid(-dot(center, neg)));
  return loss;
}

SgnsGradients sgns_pair_gradients(std::span<const double> center, std::span<const double> positive,
                                  const std::vector<std::vector<double>>& negatives) {
  const std::size_t d = center.size();
  SgnsGradients g;
  g.center.assign(d, 0.0);
  g.positive.assign(d, 0.0);
  const double gp = sigmoid(dot(center, positive)) - 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    g.center[i] += gp * positive[i];
    g.positive[i] = gp * center[i];
  }
  for (const auto& neg : negatives) {
    const double gn = sigmoid(dot(center, neg));
    std::vector<double> grad_neg(d);
    for (std::size_t i = 0; i < d; ++i) {
      g.center[i] += gn * neg[i];
      grad_neg[i] = gn * center[i];
    }
    g.negatives.push_back(std::move(grad_neg));
  }
  return g;
}

WordVectorTable train_sgns(const std::vector<Document>& documents, const SgnsConfig& config,
                           SgnsTrainReport* report) {
  if (config.dim < 1 || config.window < 1 || config.negative < 1 || config.epochs < 1 ||
      config.min_count < 1 || config.noise_exponent <= 0.0 || config.noise_exponent > 1.0)
    throw Error("bad_config", "invalid SGNS configuration");

  // vocabulary with min-count filter; first-seen order keeps runs stable
  std::unordered_map<std::string, std::uint32_t> counts;
  std::vector<std::string> order;
  for (const auto& doc : documents)
    for (const auto& tok : doc.tokens) {
      auto [it, inserted] = counts.emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  std::vector<std::string> words;
  std::vector<std::uint32_t> freq;
  for (const auto& w : order) {
    if (counts[w] >= static_cast<std::uint32_t>(config.min_count)) {
      words.push_back(w);
      freq.push_back(counts[w]);
    }
  }
  const std::size_t v = words.size();
  if (v < 2) throw Error("vocabulary_too_small", "need >= 2 words after min-count filter");

  std::unordered_map<std::string, std::uint32_t> word_index;
  for (std::uint32_t i = 0; i < v; ++i) word_index.emplace(words[i], i);

  // unigram^exponent noise distribution, sampled by cdf binary search
  std::vector<double> noise_cdf(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < v; ++i) {
    acc += std::pow(static_cast<double>(freq[i]), config.noise_exponent);
    noise_cdf[i] = acc;
  }

  const std::size_t d = static_cast<std::size_t>(config.dim);
  std::mt19937_64 rng(mix64(config.seed));
  std::uniform_real_distribution<double> init(-0.5 / config.dim, 0.5 / config.dim);
  std::vector<double> input(v * d);
  std::vector<double> output(v * d, 0.0);
  for (auto& x : input) x = init(rng);

  // corpus as index sequences, OOV dropped
  std::vector<std::vector<std::uint32_t>> seqs;
  std::size_t total_tokens = 0;
  for (const auto& doc : documents) {
    std::vector<std::uint32_t> seq;
    for (const auto& tok : doc.tokens) {
      auto it = word_index.find(tok);
      if (it != word_index.end()) seq.push_back(it->second);
    }
    total_tokens += seq.size();
    if (seq.size() >= 2) seqs.push_back(std::move(seq));
  }
  if (seqs.empty()) throw Error("vocabulary_too_small", "no document has two in-vocabulary tokens");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_negative = [&](std::uint32_t avoid) {
    for (;;) {
      double u = unit(rng) * acc;
      auto it = std::lower_bound(noise_cdf.begin(), noise_cdf.end(), u);
      auto idx = static_cast<std::uint32_t>(it - noise_cdf.begin());
      if (idx >= v) idx = static_cast<std::uint32_t>(v - 1);
      if (idx != avoid) return idx;
    }
  };

  const double lr0 = config.learning_rate;
  const double lr_min = lr0 * 1e-4;
  const std::size_t planned = static_cast<std::size_t>(config.epochs) * total_tokens;
  std::size_t processed = 0;
  std::vector<double> grad_center(d);

  if (report) report->epoch_mean_loss.clear();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& seq : seqs) {
      for (std::size_t pos = 0; pos < seq.size(); ++pos) {
        const double frac = planned ? static_cast<double>(processed) / planned : 0.0;
        const double lr = std::max(lr_min, lr0 * (1.0 - frac));
        ++processed;
        const std::uint32_t center = seq[pos];
        const std::size_t b = 1 + rng() % static_cast<std::uint64_t>(config.window);
        const std::size_t lo = pos >= b ? pos - b : 0;
        const std::size_t hi = std::min(seq.size() - 1, pos + b);
        double* vc = input.data() + static_cast<std::size_t>(center) * d;
        for (std::size_t cpos = lo; cpos <= hi; ++cpos) {
          if (cpos == pos) continue;
          const std::uint32_t context = seq[cpos];
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          double pair_loss = 0.0;
          // positive + negatives share one update to the center vector
          {
            double* uo = output.data() + static_cast<std::size_t>(context) * d;
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += vc[i] * uo[i];
            const double p = sigmoid(s);
            pair_loss -= std::log(std::max(p, 1e-12));
            const double g = (p - 1.0) * lr;
            for (std::size_t i = 0; i < d; ++i) {
              grad_center[i] += g * uo[i];
              uo[i] -= g * vc[i];
            }
          }
          for (int n = 0; n < config.negative; ++n) {
            const std::uint32_t neg = sample_negative(context);
            double* un = output.data() + static_cast<std::size_t>(neg) * d;
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += vc[i] * un[i];
            const double p = sigmoid(-s);
            pair_loss -= std::log(std::max(p, 1e-12));
            const double g = sigmoid(s) * lr;
            for (std::size_t i = 0; i < d; ++i) {
              grad_center[i] += g * un[i];
              un[i] -= g * vc[i];
            }
          }
          for (std::size_t i = 0; i < d; ++i) vc[i] -= grad_center[i];
          loss_sum += pair_loss;
          ++loss_count;
        }
      }
    }
    if (report) report->epoch_mean_loss.push_back(loss_count ? loss_sum / loss_count : 0.0);
  }

  WordVectorTable table;
  table.dim = static_cast<std::uint32_t>(d);
  table.index = std::move(word_index);
  table.data = std::move(input);
  return table;
}

double cosine(const std::string& w1, const std::string& w2, const WordVectorTable& table) {
  auto a = table.vec(w1);
  auto b = table.vec(w2);
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) throw Error("zero_vector", "cosine undefined for zero vectors");
  return dot(a, b) / (na * nb);
}

WordVectorTable load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("file_not_found", path);
  std::string line;
  if (!std::getline(in, line)) throw Error("vector_parse_error", path + ":1: missing header");
  std::istringstream header(line);
  std::size_t count = 0, dim = 0;
  if (!(header >> count >> dim) || count == 0 || dim == 0)
    throw Error("vector_parse_error", path + ":1: bad header");
  WordVectorTable table;
  table.dim = static_cast<std::uint32_t>(dim);
  table.data.reserve(count * dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string word;
    if (!(row >> word)) throw Error("vector_parse_error", path + ":" + std::to_string(lineno));
    if (table.index.count(word))
      throw Error("duplicate_word", path + ":" + std::to_string(lineno) + ": " + word);
    std::vector<double> values;
    double x;
    while (row >> x) values.push_back(x);
    if (values.size() != dim)
      throw Error("vector_parse_error",
                  path + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                      " floats, got " + std::to_string(values.size()));
    table.index.emplace(word, static_cast<std::uint32_t>(table.index.size()));
    table.data.insert(table.data.end(), values.begin(), values.end());
  }
  if (table.index.size() != count)
    throw Error("vector_parse_error", path + ": header says " + std::to_string(count) +
                                          " words, file has " + std::to_string(table.index.size()));
  return table;
}

void save_word_vectors(const WordVectorTable& table, const std::string& path) {
  // rows sorted by index so output is reproducible
  std::vector<const std::string*> by_row(table.size());
  for (const auto& [word, row] : table.index) by_row[row] = &word;
  std::ostringstream out;
  out << table.size() << ' ' << table.dim << '\n';
  char buf[64];
  for (std::size_t r = 0; r < by_row.size(); ++r) {
    out << *by_row[r];
    auto v = table.vec(static_cast<std::uint32_t>(r));
    for (double x : v) {
      std::snprintf(buf, sizeof(buf), " %.6g", x);
      out << buf;
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

}  // namespace hiertax
