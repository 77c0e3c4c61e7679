// Command-line pipeline driver: synth -> embed -> featurize -> train ->
// predict -> evaluate / confusion, all reproducible from one master seed.

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hiertax/config.hpp"
#include "hiertax/confusion.hpp"
#include "hiertax/corpus.hpp"
#include "hiertax/embeddings.hpp"
#include "hiertax/ensemble.hpp"
#include "hiertax/error.hpp"
#include "hiertax/featurize.hpp"
#include "hiertax/io.hpp"
#include "hiertax/metrics.hpp"
#include "hiertax/seeds.hpp"
#include "hiertax/syngen.hpp"
#include "hiertax/taxonomy.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hiertax;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
};

RunConfig load_config(const GlobalOpts& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = RunConfig::load(g.config_path);
  if (g.seed_set) cfg.master_seed = g.seed;
  if (g.workers > 0) cfg.workers = g.workers;
  cfg.ensemble.workers = cfg.workers;
  return cfg;
}

IngestOptions ingest_options(const RunConfig& cfg) {
  IngestOptions opts;
  opts.title_weight = cfg.title_weight;
  opts.reject_labels.clear();
  for (const auto& l : cfg.reject_labels) opts.reject_labels.insert(l);
  return opts;
}

std::vector<Document> ingest_or_die(const std::vector<RawRecord>& records,
                                    const TaxonomyTree& taxonomy, const RunConfig& cfg,
                                    const std::string& rejection_path) {
  auto result = ingest(records, taxonomy, ingest_options(cfg));
  if (!rejection_path.empty()) write_rejections_jsonl(result.rejections, rejection_path);
  if (result.documents.empty()) throw Error("empty_corpus", "no document survived ingestion");
  return std::move(result.documents);
}

TaxonomyTree load_taxonomy(const std::string& path) {
  return TaxonomyTree::from_json(read_file(path));
}

void write_predictions(const std::vector<std::pair<std::string, PredictionList>>& preds,
                       const TaxonomyTree& taxonomy, const std::string& path) {
  std::ostringstream out;
  for (const auto& [id, list] : preds) {
    json j;
    j["id"] = id;
    json arr = json::array();
    for (const auto& [path_id, prob] : list) {
      json e;
      e["path"] = taxonomy.path_names(path_id);
      e["path_id"] = path_id;
      e["prob"] = prob;
      arr.push_back(e);
    }
    j["predictions"] = arr;
    out << j.dump() << '\n';
  }
  atomic_write(path, out.str());
}

std::vector<std::pair<std::string, PredictionList>> read_predictions(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<std::string, PredictionList>> preds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      PredictionList list;
      for (const auto& e : j.at("predictions"))
        list.emplace_back(e.at("path_id").get<PathId>(), e.at("prob").get<double>());
      preds.emplace_back(j.at("id").get<std::string>(), std::move(list));
    } catch (const json::exception& e) {
      throw Error("prediction_parse_error", path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return preds;
}

// truth corpus -> id -> PathId
std::vector<EvalCase> build_cases(const std::vector<std::pair<std::string, PredictionList>>& preds,
                                  const std::string& truth_path, const TaxonomyTree& taxonomy) {
  std::unordered_map<std::string, PathId> truth;
  for (const auto& rec : read_records_jsonl(truth_path)) {
    auto p = taxonomy.find_path(rec.path);
    if (p) truth.emplace(rec.id, *p);
  }
  std::vector<EvalCase> cases;
  for (const auto& [id, list] : preds) {
    auto it = truth.find(id);
    if (it == truth.end()) continue;
    cases.push_back({it->second, list});
  }
  if (cases.empty()) throw Error("empty_cases", "no prediction id matches the truth corpus");
  return cases;
}

int cmd_synth(const GlobalOpts& g, const SynthConfig& synth) {
  auto result = generate(synth);
  fs::create_directories(g.out_dir);
  write_records_jsonl(result.records, g.out_dir + "/corpus.jsonl");
  auto taxonomy = TaxonomyTree::build(result.paths);
  atomic_write(g.out_dir + "/taxonomy.json", taxonomy.to_json() + "\n");
  std::printf("synth: %zu records, %zu paths, %zu nodes\n", result.records.size(),
              taxonomy.path_count(), taxonomy.node_count());
  return 0;
}

int cmd_embed(const GlobalOpts& g, const std::string& corpus_path,
              const std::string& taxonomy_path) {
  RunConfig cfg = load_config(g);
  auto taxonomy = load_taxonomy(taxonomy_path);
  auto docs = ingest_or_die(read_records_jsonl(corpus_path), taxonomy, cfg, "");
  SgnsConfig sgns = cfg.sgns;
  sgns.seed = derive_seed(cfg.master_seed, "sgns");
  auto table = train_sgns(docs, sgns);
  fs::create_directories(g.out_dir);
  save_word_vectors(table, g.out_dir + "/vectors.txt");
  std::printf("embed: %zu words, dim %u\n", table.size(), table.dim);
  return 0;
}

int cmd_featurize(const GlobalOpts& g, const std::string& corpus_path,
                  const std::string& taxonomy_path, const std::string& vectors_path,
                  const std::string& mode) {
  RunConfig cfg = load_config(g);
  auto taxonomy = load_taxonomy(taxonomy_path);
  fs::create_directories(g.out_dir);
  auto docs = ingest_or_die(read_records_jsonl(corpus_path), taxonomy, cfg,
                            g.out_dir + "/rejections.jsonl");
  auto [vocab, idf] = compute_idf(docs);
  atomic_write(g.out_dir + "/idf.json", idf_to_json(idf) + "\n");

  FeatureMatrix m;
  m.rows = docs.size();
  m.layout = mode;
  if (mode == "gwbowv" || mode == "bocv" || mode == "awv") {
    auto table = load_word_vectors(vectors_path);
    if (mode == "awv") {
      m.cols = table.dim;
      m.word_dim = table.dim;
      for (const auto& doc : docs) {
        auto v = awv(doc, table);
        for (double x : v) m.data.push_back(static_cast<float>(x));
      }
    } else {
      auto cluster = kmeans(table, cfg.clusters, derive_seed(cfg.master_seed, "kmeans"),
                            cfg.kmeans_max_iters);
      atomic_write(g.out_dir + "/clusters.json", cluster.to_json() + "\n");
      m.clusters = cfg.clusters;
      m.word_dim = table.dim;
      m.cols = mode == "gwbowv" ? static_cast<std::size_t>(cfg.clusters) * table.dim + cfg.clusters
                                : cfg.clusters;
      for (const auto& doc : docs) {
        auto v = mode == "gwbowv" ? gwbowv(doc, cluster, idf, table) : bocv(doc, cluster);
        for (double x : v) m.data.push_back(static_cast<float>(x));
      }
    }
  } else if (mode == "tfidf") {
    auto model = build_tfidf_model(docs, cfg.tfidf_features);
    atomic_write(g.out_dir + "/tfidf.json", model.to_json() + "\n");
    m.cols = model.size();
    for (const auto& doc : docs) {
      std::vector<float> row(m.cols, 0.0f);
      for (const auto& [idx, w] : tfidf_vector(doc, model)) row[idx] = static_cast<float>(w);
      m.data.insert(m.data.end(), row.begin(), row.end());
    }
  } else {
    throw Error("bad_config", "unknown featurize mode: " + mode);
  }
  save_feature_matrix(m, g.out_dir + "/features");
  std::printf("featurize: %zu x %zu (%s)\n", m.rows, m.cols, mode.c_str());
  return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& features_dir,
              const std::string& corpus_path, const std::string& taxonomy_path,
              const std::string& vectors_path) {
  RunConfig cfg = load_config(g);
  auto taxonomy = load_taxonomy(taxonomy_path);
  auto docs = ingest_or_die(read_records_jsonl(corpus_path), taxonomy, cfg, "");
  auto features = load_feature_matrix(features_dir + "/features");

  EnsembleConfig ecfg = cfg.ensemble;
  ecfg.seed = derive_seed(cfg.master_seed, "ensemble");
  ecfg.workers = cfg.workers;
  auto model = train_ensemble(features, docs, taxonomy, ecfg);

  fs::create_directories(g.out_dir);
  save_ensemble(model, g.out_dir);
  // prediction-time featurization artifacts travel with the bundle
  atomic_write(g.out_dir + "/taxonomy.json", taxonomy.to_json() + "\n");
  fs::copy_file(features_dir + "/clusters.json", g.out_dir + "/clusters.json",
                fs::copy_options::overwrite_existing);
  fs::copy_file(features_dir + "/idf.json", g.out_dir + "/idf.json",
                fs::copy_options::overwrite_existing);
  fs::copy_file(vectors_path, g.out_dir + "/vectors.txt", fs::copy_options::overwrite_existing);
  json extra;
  extra["title_weight"] = cfg.title_weight;
  extra["reject_labels"] = cfg.reject_labels;
  atomic_write(g.out_dir + "/ingest.json", extra.dump(2) + "\n");
  std::printf("train: bundle written to %s\n", g.out_dir.c_str());
  return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& bundle_dir,
                const std::string& corpus_path, std::size_t k_top, bool path_only) {
  if (!fs::exists(bundle_dir + "/manifest.json")) throw Error("bundle_not_found", bundle_dir);
  auto model = load_ensemble(bundle_dir);
  auto taxonomy = load_taxonomy(bundle_dir + "/taxonomy.json");
  auto table = load_word_vectors(bundle_dir + "/vectors.txt");
  auto cluster = ClusterModel::from_json(read_file(bundle_dir + "/clusters.json"));
  auto idf = idf_from_json(read_file(bundle_dir + "/idf.json"));

  RunConfig cfg = load_config(g);
  json ingest_cfg = json::parse(read_file(bundle_dir + "/ingest.json"));
  cfg.title_weight = ingest_cfg.value("title_weight", cfg.title_weight);
  if (ingest_cfg.contains("reject_labels"))
    cfg.reject_labels = ingest_cfg["reject_labels"].get<std::vector<std::string>>();

  fs::create_directories(g.out_dir);
  auto docs = ingest_or_die(read_records_jsonl(corpus_path), taxonomy, cfg,
                            g.out_dir + "/rejections.jsonl");

  std::vector<std::pair<std::string, PredictionList>> preds;
  for (const auto& doc : docs) {
    auto v = gwbowv(doc, cluster, idf, table);
    std::vector<float> row(v.begin(), v.end());
    auto list = path_only
                    ? predict_path_only(row.data(), row.size(), model.bundle.path_clf,
                                        model.bundle.n_paths, k_top)
                    : predict_top_k(row.data(), row.size(), model, k_top);
    preds.emplace_back(doc.id, std::move(list));
  }
  write_predictions(preds, taxonomy, g.out_dir + "/predictions.jsonl");
  std::printf("predict: %zu documents\n", preds.size());
  return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& predictions_path,
                 const std::string& truth_path, const std::string& taxonomy_path,
                 const std::vector<std::size_t>& ks) {
  auto taxonomy = load_taxonomy(taxonomy_path);
  auto cases = build_cases(read_predictions(predictions_path), truth_path, taxonomy);
  auto result = evaluate(cases, taxonomy, ks);
  fs::create_directories(g.out_dir);
  atomic_write(g.out_dir + "/metrics.csv", eval_result_csv(result));
  std::fputs(eval_result_table(result).c_str(), stdout);
  return 0;
}

int cmd_confusion(const GlobalOpts& g, const std::string& predictions_path,
                  const std::string& truth_path, const std::string& taxonomy_path, double alpha,
                  const std::string& mode_name, bool absolute) {
  auto taxonomy = load_taxonomy(taxonomy_path);
  auto cases = build_cases(read_predictions(predictions_path), truth_path, taxonomy);
  std::vector<std::uint32_t> truths, top1;
  for (const auto& c : cases) {
    if (c.predictions.empty()) continue;
    truths.push_back(c.truth);
    top1.push_back(c.predictions.front().first);
  }
  auto cm = confusion_matrix(truths, top1, taxonomy.path_count());
  auto graph = build_graph(cm, alpha, absolute);
  GroupMode mode;
  if (mode_name == "weak")
    mode = GroupMode::weak;
  else if (mode_name == "strong")
    mode = GroupMode::strong;
  else if (mode_name == "biconnected")
    mode = GroupMode::biconnected;
  else
    throw Error("bad_config", "unknown group mode: " + mode_name);
  auto group_set = groups(graph, mode);

  std::vector<std::string> names;
  for (PathId p = 0; p < taxonomy.path_count(); ++p) {
    auto parts = taxonomy.path_names(p);
    std::string name;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) name += '/';
      name += parts[i];
    }
    names.push_back(name);
  }
  fs::create_directories(g.out_dir);
  atomic_write(g.out_dir + "/confusion.dot", export_dot(graph, group_set, names));
  atomic_write(g.out_dir + "/confusion.csv", confusion_csv(cm, names));
  std::printf("confusion: %zu edges, %zu groups, %zu isolated\n", graph.edges.size(),
              group_set.groups.size(), group_set.isolated.size());
  for (const auto& grp : group_set.groups) {
    std::string line = "group:";
    for (std::uint32_t v : grp) line += " " + names[v];
    std::puts(line.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical taxonomy-path text classification pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "run configuration JSON file");
  app.add_option("--out-dir", g.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "master seed override");
  app.add_option("--workers", g.workers, "worker thread count");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  SynthConfig synth_cfg;
  std::vector<int> branching = {4, 3, 2};
  std::vector<int> confuse;
  double overlap = 0.0;
  synth->add_option("--branching", branching, "children per tree level");
  synth->add_option("--docs-per-leaf", synth_cfg.docs_per_leaf, "base documents per leaf");
  synth->add_option("--skew", synth_cfg.skew, "Zipf exponent over leaf rank");
  synth->add_option("--topic-fraction", synth_cfg.topic_fraction, "topic token share");
  synth->add_option("--words-per-node", synth_cfg.words_per_node, "topic words per node");
  synth->add_option("--noise-vocab", synth_cfg.noise_vocab, "shared noise vocabulary size");
  synth->add_option("--min-tokens", synth_cfg.min_tokens, "min tokens per document");
  synth->add_option("--max-tokens", synth_cfg.max_tokens, "max tokens per document");
  synth->add_option("--confuse", confuse, "leaf index pair to confuse")->expected(2);
  synth->add_option("--overlap", overlap, "vocabulary overlap for the confused pair");

  // embed
  auto* embed = app.add_subcommand("embed", "train SGNS word vectors on a corpus");
  std::string corpus_path, taxonomy_path, vectors_path, features_dir, bundle_dir;
  embed->add_option("--corpus", corpus_path, "corpus JSON-lines")->required();
  embed->add_option("--taxonomy", taxonomy_path, "taxonomy JSON")->required();

  // featurize
  auto* featurize = app.add_subcommand("featurize", "compose document feature vectors");
  std::string mode = "gwbowv";
  featurize->add_option("--corpus", corpus_path, "corpus JSON-lines")->required();
  featurize->add_option("--taxonomy", taxonomy_path, "taxonomy JSON")->required();
  featurize->add_option("--vectors", vectors_path, "word vectors file");
  featurize->add_option("--mode", mode, "gwbowv | awv | bocv | tfidf");

  // train
  auto* train = app.add_subcommand("train", "train the two-level ensemble");
  train->add_option("--features", features_dir, "featurize output directory")->required();
  train->add_option("--corpus", corpus_path, "corpus JSON-lines")->required();
  train->add_option("--taxonomy", taxonomy_path, "taxonomy JSON")->required();
  train->add_option("--vectors", vectors_path, "word vectors file")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "predict ranked taxonomy paths");
  std::size_t k_top = 6;
  bool path_only = false;
  predict->add_option("--bundle", bundle_dir, "model bundle directory")->required();
  predict->add_option("--corpus", corpus_path, "corpus JSON-lines")->required();
  predict->add_option("--k-top", k_top, "number of paths to return");
  predict->add_flag("--path-only", path_only, "use the level-one path classifier directly");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "compute PP/CP/LR/LC at each K");
  std::string predictions_path, truth_path;
  std::vector<std::size_t> ks = {1, 3, 6};
  eval->add_option("--predictions", predictions_path, "predictions JSON-lines")->required();
  eval->add_option("--truth", truth_path, "truth corpus JSON-lines")->required();
  eval->add_option("--taxonomy", taxonomy_path, "taxonomy JSON")->required();
  eval->add_option("--k", ks, "K values");

  // confusion
  auto* confusion = app.add_subcommand("confusion", "confusion graph and group discovery");
  double alpha = 0.1;
  std::string group_mode = "weak";
  bool absolute = false;
  confusion->add_option("--predictions", predictions_path, "predictions JSON-lines")->required();
  confusion->add_option("--truth", truth_path, "truth corpus JSON-lines")->required();
  confusion->add_option("--taxonomy", taxonomy_path, "taxonomy JSON")->required();
  confusion->add_option("--alpha", alpha, "confusion threshold");
  confusion->add_option("--mode", group_mode, "weak | strong | biconnected");
  confusion->add_flag("--absolute", absolute, "threshold raw counts instead of probabilities");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*synth) {
      synth_cfg.branching = branching;
      RunConfig cfg = load_config(g);
      synth_cfg.seed = derive_seed(cfg.master_seed, "syngen");
      if (!confuse.empty()) synth_cfg = plant_confusion(synth_cfg, confuse[0], confuse[1], overlap);
      return cmd_synth(g, synth_cfg);
    }
    if (*embed) return cmd_embed(g, corpus_path, taxonomy_path);
    if (*featurize) return cmd_featurize(g, corpus_path, taxonomy_path, vectors_path, mode);
    if (*train) return cmd_train(g, features_dir, corpus_path, taxonomy_path, vectors_path);
    if (*predict) return cmd_predict(g, bundle_dir, corpus_path, k_top, path_only);
    if (*eval) return cmd_evaluate(g, predictions_path, truth_path, taxonomy_path, ks);
    if (*confusion)
      return cmd_confusion(g, predictions_path, truth_path, taxonomy_path, alpha, group_mode,
                           absolute);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 3;
  }
  return 1;
}
