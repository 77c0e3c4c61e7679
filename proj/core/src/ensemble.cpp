#include "hiertax/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"
#include "hiertax/seeds.hpp"

namespace hiertax {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::size_t LevelOneBundle::prob_dim() const {
  std::size_t dim = n_paths + n_nodes;
  for (std::size_t s : depth_block_sizes) dim += s;
  return dim;
}

std::vector<std::pair<std::size_t, std::uint32_t>> depth_training_set(
    const std::vector<Document>& documents, const TaxonomyTree& taxonomy, std::uint32_t k,
    double none_fraction, std::uint64_t seed) {
  if (none_fraction < 0.0 || none_fraction > 1.0)
    throw Error("bad_config", "none_fraction must be in [0,1]");
  const auto depth_nodes = taxonomy.nodes_at_depth(k);
  std::vector<std::uint32_t> node_pos(taxonomy.node_count(), 0);
  for (std::uint32_t i = 0; i < depth_nodes.size(); ++i) node_pos[depth_nodes[i]] = i;
  const auto none_class = static_cast<std::uint32_t>(depth_nodes.size());

  std::vector<std::pair<std::size_t, std::uint32_t>> rows;
  std::vector<std::size_t> shorter;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto label = taxonomy.node_label_at_depth(documents[i].path_label, k);
    if (label)
      rows.emplace_back(i, node_pos[*label]);
    else
      shorter.push_back(i);
  }
  if (rows.empty()) throw Error("empty_depth", "no document reaches depth " + std::to_string(k));

  if (!shorter.empty() && none_fraction > 0.0) {
    const auto want = static_cast<std::size_t>(
        std::ceil(none_fraction * static_cast<double>(shorter.size())));
    std::mt19937_64 rng(derive_seed(seed, "depth_none/" + std::to_string(k)));
    for (std::size_t i = 0; i + 1 < shorter.size(); ++i) {
      const std::size_t j = i + rng() % (shorter.size() - i);
      std::swap(shorter[i], shorter[j]);
    }
    shorter.resize(std::min(want, shorter.size()));
    std::sort(shorter.begin(), shorter.end());
    for (std::size_t i : shorter) rows.emplace_back(i, none_class);
  }
  return rows;
}

std::vector<std::pair<std::size_t, std::uint32_t>> train_node_set(
    const std::vector<Document>& documents, const TaxonomyTree& taxonomy) {
  if (documents.empty()) throw Error("empty_corpus", "node training set needs documents");
  std::vector<std::pair<std::size_t, std::uint32_t>> rows;
  for (std::size_t i = 0; i < documents.size(); ++i)
    for (NodeId n : taxonomy.path_nodes(documents[i].path_label)) rows.emplace_back(i, n);
  return rows;
}

namespace {

LabeledMatrix gather_rows(const FeatureMatrix& features,
                          const std::vector<std::pair<std::size_t, std::uint32_t>>& rows) {
  LabeledMatrix m;
  m.cols = features.cols;
  m.data.reserve(rows.size() * features.cols);
  for (const auto& [idx, label] : rows) m.push_row(features.row(idx), label);
  return m;
}

// scatter per-class probabilities into a fixed block by label id
void scatter(const ForestModel& model, const std::vector<double>& proba, float* block,
             std::size_t block_size) {
  std::fill(block, block + block_size, 0.0f);
  for (std::size_t c = 0; c < model.classes.size(); ++c)
    block[model.classes[c]] = static_cast<float>(proba[c]);
}

struct LevelOneTrainer {
  const FeatureMatrix& features;
  const std::vector<Document>& documents;
  const TaxonomyTree& taxonomy;
  const EnsembleConfig& config;

  std::vector<std::pair<std::size_t, std::uint32_t>> path_rows() const {
    std::vector<std::pair<std::size_t, std::uint32_t>> rows;
    for (std::size_t i = 0; i < documents.size(); ++i)
      rows.emplace_back(i, documents[i].path_label);
    return rows;
  }

  ForestModel train_subset(const std::vector<std::pair<std::size_t, std::uint32_t>>& rows,
                           const std::vector<bool>& keep, const ForestConfig& fc,
                           std::string_view name) const {
    std::vector<std::pair<std::size_t, std::uint32_t>> sub;
    for (const auto& r : rows)
      if (keep.empty() || keep[r.first]) sub.push_back(r);
    ForestConfig cfg = fc;
    cfg.seed = derive_seed(config.seed, name);
    cfg.workers = config.workers;
    return train_forest(gather_rows(features, sub), cfg);
  }
};

}  // namespace

std::vector<double> meta_features(const float* row, std::size_t dim,
                                  const LevelOneBundle& bundle) {
  if (dim != bundle.path_clf.input_dim)
    throw Error("dim_mismatch", "feature row dimension != bundle input dimension");
  std::vector<double> out(bundle.meta_dim(dim));
  for (std::size_t i = 0; i < dim; ++i) out[i] = row[i];
  std::size_t offset = dim;

  auto write_block = [&](const ForestModel& model, std::size_t block_size) {
    const auto proba = forest_proba(model, row, dim);
    std::fill(out.begin() + offset, out.begin() + offset + block_size, 0.0);
    for (std::size_t c = 0; c < model.classes.size(); ++c)
      out[offset + model.classes[c]] = proba[c];
    offset += block_size;
  };
  write_block(bundle.path_clf, bundle.n_paths);
  write_block(bundle.node_clf, bundle.n_nodes);
  for (std::size_t k = 0; k < bundle.depth_clf.size(); ++k)
    write_block(bundle.depth_clf[k], bundle.depth_block_sizes[k]);
  return out;
}

EnsembleModel train_ensemble(const FeatureMatrix& features,
                             const std::vector<Document>& documents,
                             const TaxonomyTree& taxonomy, const EnsembleConfig& config) {
  if (features.rows != documents.size())
    throw Error("shape_mismatch", "feature rows must align with documents");
  if (documents.empty()) throw Error("empty_corpus", "ensemble training needs documents");

  const std::size_t n = documents.size();
  const std::size_t dim = features.cols;
  LevelOneTrainer trainer{features, documents, taxonomy, config};

  EnsembleModel model;
  model.feature_dim = dim;
  model.seed = config.seed;
  auto& bundle = model.bundle;
  bundle.n_paths = taxonomy.path_count();
  bundle.n_nodes = taxonomy.node_count();
  for (std::uint32_t k = 1; k <= taxonomy.max_depth(); ++k) {
    bundle.depth_node_ids.push_back(taxonomy.nodes_at_depth(k));
    bundle.depth_block_sizes.push_back(bundle.depth_node_ids.back().size() + 1);
  }

  // level-one training sets
  const auto path_rows = trainer.path_rows();
  const auto node_rows = train_node_set(documents, taxonomy);
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> depth_rows;
  for (std::uint32_t k = 1; k <= taxonomy.max_depth(); ++k)
    depth_rows.push_back(depth_training_set(documents, taxonomy, k, config.none_fraction,
                                            derive_seed(config.seed, "depth_set")));

  // full-data level-one models (used at prediction time)
  bundle.path_clf = trainer.train_subset(path_rows, {}, config.path_forest, "pp");
  bundle.node_clf = trainer.train_subset(node_rows, {}, config.node_forest, "np");
  for (std::uint32_t k = 1; k <= taxonomy.max_depth(); ++k)
    bundle.depth_clf.push_back(trainer.train_subset(depth_rows[k - 1], {}, config.depth_forest,
                                                    "dnp/" + std::to_string(k)));

  // meta features for level two; out-of-fold keeps the level-two classifier
  // from seeing level-one probabilities fit on the same rows
  const std::size_t meta_dim = bundle.meta_dim(dim);
  LabeledMatrix meta;
  meta.cols = meta_dim;
  meta.data.assign(n * meta_dim, 0.0f);
  meta.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    meta.labels[i] = documents[i].path_label;
    const float* row = features.row(i);
    float* out = meta.data.data() + i * meta_dim;
    for (std::size_t j = 0; j < dim; ++j) out[j] = row[j];
  }

  auto fill_blocks = [&](std::size_t i, const ForestModel& pp, const ForestModel& np,
                         const std::vector<ForestModel>& dnp) {
    const float* row = features.row(i);
    float* out = meta.data.data() + i * meta_dim + dim;
    scatter(pp, forest_proba(pp, row, dim), out, bundle.n_paths);
    out += bundle.n_paths;
    scatter(np, forest_proba(np, row, dim), out, bundle.n_nodes);
    out += bundle.n_nodes;
    for (std::size_t k = 0; k < dnp.size(); ++k) {
      scatter(dnp[k], forest_proba(dnp[k], row, dim), out, bundle.depth_block_sizes[k]);
      out += bundle.depth_block_sizes[k];
    }
  };

  if (config.out_of_fold && config.oof_folds >= 2 && n >= static_cast<std::size_t>(config.oof_folds)) {
    std::vector<std::uint32_t> fold(n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(derive_seed(config.seed, "oof"));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + rng() % (n - i);
      std::swap(perm[i], perm[j]);
    }
    for (std::size_t i = 0; i < n; ++i)
      fold[perm[i]] = static_cast<std::uint32_t>(i % config.oof_folds);

    for (int f = 0; f < config.oof_folds; ++f) {
      std::vector<bool> keep(n);
      for (std::size_t i = 0; i < n; ++i) keep[i] = fold[i] != static_cast<std::uint32_t>(f);
      const std::string tag = "fold" + std::to_string(f) + "/";
      // degenerate folds (single class in some subset) fall back to the
      // full-data models for that block
      ForestModel pp, np;
      std::vector<ForestModel> dnp;
      try {
        pp = trainer.train_subset(path_rows, keep, config.path_forest, tag + "pp");
      } catch (const Error&) {
        pp = bundle.path_clf;
      }
      try {
        np = trainer.train_subset(node_rows, keep, config.node_forest, tag + "np");
      } catch (const Error&) {
        np = bundle.node_clf;
      }
      for (std::uint32_t k = 1; k <= taxonomy.max_depth(); ++k) {
        try {
          dnp.push_back(trainer.train_subset(depth_rows[k - 1], keep, config.depth_forest,
                                             tag + "dnp/" + std::to_string(k)));
        } catch (const Error&) {
          dnp.push_back(bundle.depth_clf[k - 1]);
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        if (!keep[i]) fill_blocks(i, pp, np, dnp);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      fill_blocks(i, bundle.path_clf, bundle.node_clf, bundle.depth_clf);
  }

  std::size_t m_out = config.m_out;
  if (m_out > meta_dim) {
    std::fprintf(stderr, "warning: m_out %zu exceeds meta dimension %zu, keeping all features\n",
                 m_out, meta_dim);
    m_out = meta_dim;
  }
  model.selector = anova_select(meta, m_out);

  LabeledMatrix reduced;
  reduced.cols = model.selector.indices.size();
  reduced.data.reserve(n * reduced.cols);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = apply_selector(model.selector, meta.row(i), meta_dim);
    reduced.push_row(row.data(), meta.labels[i]);
  }
  ForestConfig fpp = config.path_forest;
  fpp.seed = derive_seed(config.seed, "fpp");
  fpp.workers = config.workers;
  model.final_clf = train_forest(reduced, fpp);
  return model;
}

namespace {

PredictionList rank_paths(const ForestModel& model, const std::vector<double>& proba,
                          std::size_t n_paths, std::size_t k_top) {
  std::vector<double> full(n_paths, 0.0);
  for (std::size_t c = 0; c < model.classes.size(); ++c) full[model.classes[c]] = proba[c];
  std::vector<PathId> order(n_paths);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](PathId a, PathId b) {
    if (full[a] != full[b]) return full[a] > full[b];
    return a < b;
  });
  PredictionList out;
  for (std::size_t i = 0; i < std::min(k_top, order.size()); ++i)
    out.emplace_back(order[i], full[order[i]]);
  return out;
}

}  // namespace

PredictionList predict_top_k(const float* row, std::size_t dim, const EnsembleModel& model,
                             std::size_t k_top) {
  if (k_top < 1) throw Error("bad_config", "k_top must be >= 1");
  const auto meta = meta_features(row, dim, model.bundle);
  std::vector<float> meta_f(meta.begin(), meta.end());
  const auto reduced = apply_selector(model.selector, meta_f.data(), meta_f.size());
  const auto proba = forest_proba(model.final_clf, reduced.data(), reduced.size());
  return rank_paths(model.final_clf, proba, model.bundle.n_paths, k_top);
}

PredictionList predict_path_only(const float* row, std::size_t dim, const ForestModel& path_clf,
                                 std::size_t n_paths, std::size_t k_top) {
  if (k_top < 1) throw Error("bad_config", "k_top must be >= 1");
  const auto proba = forest_proba(path_clf, row, dim);
  return rank_paths(path_clf, proba, n_paths, k_top);
}

void save_ensemble(const EnsembleModel& model, const std::string& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["format_version"] = 1;
  manifest["feature_dim"] = model.feature_dim;
  manifest["seed"] = model.seed;
  manifest["n_paths"] = model.bundle.n_paths;
  manifest["n_nodes"] = model.bundle.n_nodes;
  manifest["depth_block_sizes"] = model.bundle.depth_block_sizes;
  manifest["depth_node_ids"] = model.bundle.depth_node_ids;
  manifest["depths"] = model.bundle.depth_clf.size();
  atomic_write(dir + "/manifest.json", manifest.dump(2) + "\n");
  atomic_write(dir + "/pp.json", model.bundle.path_clf.to_json());
  atomic_write(dir + "/np.json", model.bundle.node_clf.to_json());
  for (std::size_t k = 0; k < model.bundle.depth_clf.size(); ++k)
    atomic_write(dir + "/dnp_" + std::to_string(k + 1) + ".json",
                 model.bundle.depth_clf[k].to_json());
  atomic_write(dir + "/selector.json", model.selector.to_json());
  atomic_write(dir + "/fpp.json", model.final_clf.to_json());
}

EnsembleModel load_ensemble(const std::string& dir) {
  if (!fs::exists(dir + "/manifest.json")) throw Error("bundle_not_found", dir);
  EnsembleModel model;
  json manifest;
  try {
    manifest = json::parse(read_file(dir + "/manifest.json"));
  } catch (const json::exception& e) {
    throw Error("manifest_parse_error", e.what());
  }
  model.feature_dim = manifest.at("feature_dim").get<std::size_t>();
  model.seed = manifest.at("seed").get<std::uint64_t>();
  model.bundle.n_paths = manifest.at("n_paths").get<std::size_t>();
  model.bundle.n_nodes = manifest.at("n_nodes").get<std::size_t>();
  model.bundle.depth_block_sizes =
      manifest.at("depth_block_sizes").get<std::vector<std::size_t>>();
  model.bundle.depth_node_ids =
      manifest.at("depth_node_ids").get<std::vector<std::vector<std::uint32_t>>>();
  const auto depths = manifest.at("depths").get<std::size_t>();
  model.bundle.path_clf = ForestModel::from_json(read_file(dir + "/pp.json"));
  model.bundle.node_clf = ForestModel::from_json(read_file(dir + "/np.json"));
  for (std::size_t k = 1; k <= depths; ++k)
    model.bundle.depth_clf.push_back(
        ForestModel::from_json(read_file(dir + "/dnp_" + std::to_string(k) + ".json")));
  model.selector = AnovaSelector::from_json(read_file(dir + "/selector.json"));
  model.final_clf = ForestModel::from_json(read_file(dir + "/fpp.json"));
  return model;
}

}  // namespace hiertax
