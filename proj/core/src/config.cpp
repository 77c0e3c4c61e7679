#include "hiertax/config.hpp"

#include <nlohmann/json.hpp>

#include "hiertax/error.hpp"
#include "hiertax/io.hpp"

namespace hiertax {

using json = nlohmann::json;

namespace {

json forest_json(const ForestConfig& f) {
  return {{"trees", f.trees},
          {"max_depth", f.max_depth},
          {"min_samples_leaf", f.min_samples_leaf},
          {"bootstrap", f.bootstrap}};
}

ForestConfig forest_from(const json& j, ForestConfig base) {
  base.trees = j.value("trees", base.trees);
  base.max_depth = j.value("max_depth", base.max_depth);
  base.min_samples_leaf = j.value("min_samples_leaf", base.min_samples_leaf);
  base.bootstrap = j.value("bootstrap", base.bootstrap);
  return base;
}

}  // namespace

std::string RunConfig::to_json() const {
  json j;
  j["format_version"] = 1;
  j["master_seed"] = master_seed;
  j["workers"] = workers;
  j["title_weight"] = title_weight;
  j["reject_labels"] = reject_labels;
  j["sgns"] = {{"dim", sgns.dim},           {"window", sgns.window},
               {"negative", sgns.negative}, {"epochs", sgns.epochs},
               {"learning_rate", sgns.learning_rate},
               {"min_count", sgns.min_count},
               {"noise_exponent", sgns.noise_exponent}};
  j["clusters"] = clusters;
  j["kmeans_max_iters"] = kmeans_max_iters;
  j["ensemble"] = {{"path_forest", forest_json(ensemble.path_forest)},
                   {"node_forest", forest_json(ensemble.node_forest)},
                   {"depth_forest", forest_json(ensemble.depth_forest)},
                   {"m_out", ensemble.m_out},
                   {"none_fraction", ensemble.none_fraction},
                   {"oof_folds", ensemble.oof_folds},
                   {"out_of_fold", ensemble.out_of_fold}};
  j["tfidf_features"] = tfidf_features;
  j["k_top_list"] = k_top_list;
  j["alpha"] = alpha;
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  RunConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("config_parse_error", e.what());
  }
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.title_weight = j.value("title_weight", cfg.title_weight);
  if (j.contains("reject_labels"))
    cfg.reject_labels = j["reject_labels"].get<std::vector<std::string>>();
  if (j.contains("sgns")) {
    const auto& s = j["sgns"];
    cfg.sgns.dim = s.value("dim", cfg.sgns.dim);
    cfg.sgns.window = s.value("window", cfg.sgns.window);
    cfg.sgns.negative = s.value("negative", cfg.sgns.negative);
    cfg.sgns.epochs = s.value("epochs", cfg.sgns.epochs);
    cfg.sgns.learning_rate = s.value("learning_rate", cfg.sgns.learning_rate);
    cfg.sgns.min_count = s.value("min_count", cfg.sgns.min_count);
    cfg.sgns.noise_exponent = s.value("noise_exponent", cfg.sgns.noise_exponent);
  }
  cfg.clusters = j.value("clusters", cfg.clusters);
  cfg.kmeans_max_iters = j.value("kmeans_max_iters", cfg.kmeans_max_iters);
  if (j.contains("ensemble")) {
    const auto& e = j["ensemble"];
    if (e.contains("path_forest"))
      cfg.ensemble.path_forest = forest_from(e["path_forest"], cfg.ensemble.path_forest);
    if (e.contains("node_forest"))
      cfg.ensemble.node_forest = forest_from(e["node_forest"], cfg.ensemble.node_forest);
    if (e.contains("depth_forest"))
      cfg.ensemble.depth_forest = forest_from(e["depth_forest"], cfg.ensemble.depth_forest);
    cfg.ensemble.m_out = e.value("m_out", cfg.ensemble.m_out);
    cfg.ensemble.none_fraction = e.value("none_fraction", cfg.ensemble.none_fraction);
    cfg.ensemble.oof_folds = e.value("oof_folds", cfg.ensemble.oof_folds);
    cfg.ensemble.out_of_fold = e.value("out_of_fold", cfg.ensemble.out_of_fold);
  }
  cfg.tfidf_features = j.value("tfidf_features", cfg.tfidf_features);
  if (j.contains("k_top_list")) cfg.k_top_list = j["k_top_list"].get<std::vector<std::size_t>>();
  cfg.alpha = j.value("alpha", cfg.alpha);
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) { return from_json(read_file(path)); }

}  // namespace hiertax
