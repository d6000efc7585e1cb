// hgoe: hybrid graph outlier exposure pipeline driver.
//
// Subcommands: ingest, subgroups, synth, train, eval, run, ablate.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgoe/benchmark.hpp"
#include "hgoe/error.hpp"
#include "hgoe/experiment.hpp"
#include "hgoe/json_io.hpp"
#include "hgoe/metrics.hpp"
#include "hgoe/reporting.hpp"
#include "hgoe/rng.hpp"
#include "hgoe/tu_loader.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json default_config() {
  return json{
      {"data",
       {{"root", "."},
        {"id", ""},
        {"ood", ""},
        {"aux", json::array()},
        {"benchmark", nullptr}}},
      {"split", {{"train_fraction", 0.9}}},
      {"embedding", {{"d_s", 16}, {"wl_iterations", 3}, {"wl_dim", 64}}},
      {"cluster", {{"k", 3}, {"max_iter", 100}, {"rel_tol", 1e-4}}},
      {"graphon",
       {{"resolution_cap", 200},
        {"resolution_percentile", 0.9},
        {"svt_coefficient", nullptr},
        {"alignment", "order_preserving"}}},
      {"synthesis",
       {{"lambda_lo", 0.01},
        {"lambda_hi", 1.0},
        {"ratio_external", 1},
        {"ratio_internal", 1},
        {"total_count", nullptr}}},
      {"loss", {{"l", 2.0}, {"gamma", 2.0}, {"beta", 1.0}, {"tau_strategy", "min"}}},
      {"training",
       {{"hidden_dim", 32}, {"learning_rate", 0.01}, {"batch_size", 64}, {"epochs", 100}}},
      {"seeds", json::array({1, 2, 3, 4, 5})},
      {"ablation", "full"},
      {"histogram_bins", 20},
      {"benchmark",
       {{"seed", 12345},
        {"id_count", 200},
        {"ood_count", 120},
        {"aux_count", 200},
        {"feature_dim", 4}}},
  };
}

void deep_merge(json& base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object())
      deep_merge(base[key], value);
    else
      base[key] = value;
  }
}

// --set training.lr=0.05 style overrides; the value parses as JSON when
// possible, otherwise it is taken as a string.
void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw hgoe::DataError("--set expects KEY=VALUE, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw hgoe::DataError("--set: empty key segment in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir = "hgoe-out";
  std::string seed_list;
  std::string benchmark;
  int jobs = 0;
  bool verbose = false;
};

json load_config(const CliOptions& options) {
  json config = default_config();
  if (!options.config_path.empty()) {
    std::ifstream in(options.config_path);
    if (!in) throw hgoe::DataError("cannot open config " + options.config_path);
    json file_config;
    try {
      file_config = json::parse(in);
    } catch (const json::parse_error& e) {
      throw hgoe::DataError(options.config_path + ": " + e.what());
    }
    deep_merge(config, file_config);
  }
  for (const std::string& assignment : options.overrides) apply_override(config, assignment);
  if (!options.benchmark.empty()) config["data"]["benchmark"] = options.benchmark;
  if (!options.seed_list.empty()) {
    json seeds = json::array();
    std::size_t start = 0;
    while (start <= options.seed_list.size()) {
      const auto comma = options.seed_list.find(',', start);
      const std::string token =
          options.seed_list.substr(start, comma == std::string::npos ? comma : comma - start);
      if (!token.empty()) seeds.push_back(std::stoull(token));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (seeds.empty()) throw hgoe::DataError("--seed-list: no seeds given");
    config["seeds"] = std::move(seeds);
  }
  if (const char* env_root = std::getenv("HGOE_DATA_ROOT");
      env_root != nullptr && config["data"]["root"].get<std::string>() == ".")
    config["data"]["root"] = env_root;
  return config;
}

std::string config_digest(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hgoe::Rng::fnv1a64(config.dump())));
  return buf;
}

hgoe::ExperimentConfig experiment_from_json(const json& config) {
  hgoe::ExperimentConfig ec;
  ec.id_dataset = config["data"]["id"].get<std::string>();
  ec.ood_dataset = config["data"]["ood"].get<std::string>();
  for (const json& name : config["data"]["aux"])
    ec.auxiliary_datasets.push_back(name.get<std::string>());
  ec.seeds.clear();
  for (const json& seed : config["seeds"]) ec.seeds.push_back(seed.get<std::uint64_t>());
  ec.train_fraction = config["split"]["train_fraction"].get<double>();
  ec.embedding.d_s = config["embedding"]["d_s"].get<int>();
  ec.embedding.wl_iterations = config["embedding"]["wl_iterations"].get<int>();
  ec.embedding.wl_dim = config["embedding"]["wl_dim"].get<int>();
  ec.cluster.k = config["cluster"]["k"].get<int>();
  ec.cluster.max_iter = config["cluster"]["max_iter"].get<int>();
  ec.cluster.rel_tol = config["cluster"]["rel_tol"].get<double>();
  ec.graphon.resolution_cap = config["graphon"]["resolution_cap"].get<int>();
  ec.graphon.resolution_percentile = config["graphon"]["resolution_percentile"].get<double>();
  if (!config["graphon"]["svt_coefficient"].is_null())
    ec.graphon.svt_coefficient = config["graphon"]["svt_coefficient"].get<double>();
  const std::string alignment = config["graphon"]["alignment"].get<std::string>();
  if (alignment == "order_preserving")
    ec.graphon.alignment = hgoe::GraphonAlignment::order_preserving;
  else if (alignment == "degree_sort")
    ec.graphon.alignment = hgoe::GraphonAlignment::degree_sort;
  else
    throw hgoe::DataError("unknown graphon.alignment '" + alignment + "'");
  ec.synthesis.lambda_lo = config["synthesis"]["lambda_lo"].get<double>();
  ec.synthesis.lambda_hi = config["synthesis"]["lambda_hi"].get<double>();
  ec.synthesis.ratio_external = config["synthesis"]["ratio_external"].get<int>();
  ec.synthesis.ratio_internal = config["synthesis"]["ratio_internal"].get<int>();
  if (!config["synthesis"]["total_count"].is_null())
    ec.synthesis.total_count = config["synthesis"]["total_count"].get<int>();
  ec.loss.l = config["loss"]["l"].get<double>();
  ec.loss.gamma = config["loss"]["gamma"].get<double>();
  ec.loss.beta = config["loss"]["beta"].get<double>();
  ec.loss.tau_strategy =
      hgoe::tau_strategy_from_string(config["loss"]["tau_strategy"].get<std::string>());
  ec.training.hidden_dim = config["training"]["hidden_dim"].get<int>();
  ec.training.learning_rate = config["training"]["learning_rate"].get<double>();
  ec.training.batch_size = config["training"]["batch_size"].get<int>();
  ec.training.epochs = config["training"]["epochs"].get<int>();
  ec.histogram_bins = config["histogram_bins"].get<int>();
  ec.ablation = hgoe::ablation_from_string(config["ablation"].get<std::string>());
  return ec;
}

hgoe::SbmBenchmarkConfig benchmark_from_json(const json& config) {
  hgoe::SbmBenchmarkConfig bc;
  const json& b = config["benchmark"];
  bc.seed = b["seed"].get<std::uint64_t>();
  bc.id_count = b["id_count"].get<int>();
  bc.ood_count = b["ood_count"].get<int>();
  bc.aux_count = b["aux_count"].get<int>();
  bc.feature_dim = b["feature_dim"].get<int>();
  return bc;
}

hgoe::GraphDataset load_named_dataset(const fs::path& root, const std::string& name) {
  const fs::path json_path = root / (name + ".json");
  if (fs::exists(json_path)) return hgoe::load_json_dataset(json_path.string());
  if (fs::exists(root / name / (name + "_A.txt")))
    return hgoe::load_tu_dataset((root / name).string(), name);
  if (fs::exists(root / (name + "_A.txt"))) return hgoe::load_tu_dataset(root.string(), name);
  throw hgoe::DataError("dataset '" + name + "' not found under " + root.string() +
                        " (expected " + name + ".json or TU files)");
}

hgoe::DatasetBundle resolve_bundle(const json& config) {
  const json& data = config["data"];
  if (!data["benchmark"].is_null()) {
    const std::string kind = data["benchmark"].get<std::string>();
    if (kind != "sbm") throw hgoe::DataError("unknown benchmark '" + kind + "'");
    return hgoe::make_sbm_benchmark(benchmark_from_json(config));
  }
  const fs::path root = data["root"].get<std::string>();
  hgoe::DatasetBundle bundle;
  const std::string id_name = data["id"].get<std::string>();
  const std::string ood_name = data["ood"].get<std::string>();
  if (id_name.empty() || ood_name.empty())
    throw hgoe::DataError("config: data.id and data.ood are required (or pass --benchmark sbm)");
  bundle.id = load_named_dataset(root, id_name);
  bundle.ood = load_named_dataset(root, ood_name);
  for (const json& aux : data["aux"])
    bundle.auxiliary.push_back(load_named_dataset(root, aux.get<std::string>()));
  return bundle;
}

// Experiment config with dataset names filled from the resolved bundle, so
// pool exclusion works for benchmark data too.
hgoe::ExperimentConfig bind_names(hgoe::ExperimentConfig ec, const hgoe::DatasetBundle& bundle) {
  ec.id_dataset = bundle.id.name;
  ec.ood_dataset = bundle.ood.name;
  ec.auxiliary_datasets.clear();
  for (const auto& aux : bundle.auxiliary) ec.auxiliary_datasets.push_back(aux.name);
  return ec;
}

fs::path ensure_output_dir(const CliOptions& options) {
  const fs::path dir(options.output_dir);
  fs::create_directories(dir);
  return dir;
}

int effective_jobs(const CliOptions& options) {
  if (options.jobs > 0) return options.jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct SeedPrep {
  std::uint64_t seed = 0;
  hgoe::SplitSpec split;
  std::vector<const hgoe::Graph*> train_refs;
  hgoe::EmbeddingConfig embedding;
  Eigen::MatrixXd id_embeddings;
};

SeedPrep prepare_first_seed(const hgoe::ExperimentConfig& ec, const hgoe::DatasetBundle& bundle,
                            int jobs) {
  SeedPrep prep;
  prep.seed = ec.seeds.front();
  prep.split = hgoe::split_in_distribution(bundle.id, ec.train_fraction, prep.seed);
  for (const int idx : prep.split.train)
    prep.train_refs.push_back(&bundle.id.graphs[static_cast<std::size_t>(idx)]);
  prep.embedding = ec.embedding;
  prep.embedding.feature_dim = bundle.id.feature_dim;
  prep.id_embeddings = hgoe::embed_graphs(prep.train_refs, prep.embedding, jobs);
  return prep;
}

void write_json_file(const json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw hgoe::DataError("cannot write " + path.string());
  out << doc.dump(1) << "\n";
}

int cmd_ingest(const CliOptions& options, const std::string& tu_dir, const std::string& tu_name,
               const std::string& feature_policy, const std::string& json_path) {
  const fs::path out_dir = ensure_output_dir(options);
  std::vector<hgoe::GraphDataset> datasets;
  if (!options.benchmark.empty()) {
    const json config = load_config(options);
    hgoe::DatasetBundle bundle = resolve_bundle(config);
    datasets.push_back(std::move(bundle.id));
    datasets.push_back(std::move(bundle.ood));
    for (auto& aux : bundle.auxiliary) datasets.push_back(std::move(aux));
  } else if (!tu_dir.empty()) {
    if (tu_name.empty()) throw hgoe::DataError("ingest: --name is required with --tu");
    datasets.push_back(hgoe::load_tu_dataset(tu_dir, tu_name,
                                             hgoe::feature_policy_from_string(feature_policy)));
  } else if (!json_path.empty()) {
    datasets.push_back(hgoe::load_json_dataset(json_path));
  } else {
    throw hgoe::DataError("ingest: pass --tu DIR --name NAME, --json PATH or --benchmark sbm");
  }
  for (const auto& ds : datasets) {
    const fs::path out_path = out_dir / (ds.name + ".json");
    hgoe::save_json_dataset(ds, out_path.string());
    std::printf("%s: %zu graphs, feature_dim %d, mean nodes %.2f -> %s\n", ds.name.c_str(),
                ds.size(), ds.feature_dim, ds.mean_node_count(), out_path.string().c_str());
  }
  return 0;
}

int cmd_subgroups(const CliOptions& options) {
  const json config = load_config(options);
  const std::string digest = config_digest(config);
  const fs::path out_dir = ensure_output_dir(options);
  const hgoe::DatasetBundle bundle = resolve_bundle(config);
  const hgoe::ExperimentConfig ec = bind_names(experiment_from_json(config), bundle);
  const int jobs = effective_jobs(options);

  const SeedPrep prep = prepare_first_seed(ec, bundle, jobs);
  const hgoe::SubgroupAssignment assignment =
      hgoe::kmeans(prep.id_embeddings, ec.cluster.k, hgoe::Rng::derive(prep.seed, "cluster"),
                   ec.cluster.max_iter, ec.cluster.rel_tol);

  std::vector<int> graph_ids;
  for (const hgoe::Graph* g : prep.train_refs) graph_ids.push_back(g->graph_id);
  hgoe::write_embeddings_csv((out_dir / "embeddings.csv").string(), prep.id_embeddings,
                             graph_ids, prep.embedding, digest);

  json doc;
  doc["config_digest"] = digest;
  doc["seed"] = prep.seed;
  doc["k"] = assignment.k;
  doc["inertia"] = assignment.inertia;
  doc["train_indices"] = prep.split.train;
  doc["labels"] = assignment.labels;
  write_json_file(doc, out_dir / "subgroups.json");
  std::printf("subgroups: k=%d over %zu training graphs (inertia %.4f) -> %s\n", assignment.k,
              prep.train_refs.size(), assignment.inertia,
              (out_dir / "subgroups.json").string().c_str());
  return 0;
}

int cmd_synth(const CliOptions& options) {
  const json config = load_config(options);
  const std::string digest = config_digest(config);
  const fs::path out_dir = ensure_output_dir(options);
  const hgoe::DatasetBundle bundle = resolve_bundle(config);
  hgoe::ExperimentConfig ec =
      hgoe::apply_ablation(bind_names(experiment_from_json(config), bundle));
  const int jobs = effective_jobs(options);

  const SeedPrep prep = prepare_first_seed(ec, bundle, jobs);

  hgoe::SynthesisConfig synth;
  synth.lambda_lo = ec.synthesis.lambda_lo;
  synth.lambda_hi = ec.synthesis.lambda_hi;
  synth.ratio_external = ec.synthesis.ratio_external;
  synth.ratio_internal = ec.synthesis.ratio_internal;
  synth.total_count =
      ec.synthesis.total_count.value_or(static_cast<int>(prep.train_refs.size()));
  synth.d_s = ec.embedding.d_s;
  synth.seed = hgoe::Rng::derive(prep.seed, "synthesis");

  std::vector<hgoe::GraphDataset> all_datasets{bundle.id, bundle.ood};
  for (const auto& aux : bundle.auxiliary) all_datasets.push_back(aux);
  const hgoe::OutlierPool pool =
      hgoe::build_external_pool(all_datasets, bundle.id.name, bundle.ood.name,
                                bundle.id.feature_dim);

  std::vector<hgoe::Graph> internal;
  const auto [n_ext, n_int] = hgoe::oe_counts(synth);
  if (n_int > 0) {
    const hgoe::SubgroupAssignment assignment =
        hgoe::kmeans(prep.id_embeddings, ec.cluster.k, hgoe::Rng::derive(prep.seed, "cluster"),
                     ec.cluster.max_iter, ec.cluster.rel_tol);
    std::vector<int> node_counts;
    for (const hgoe::Graph* g : prep.train_refs) node_counts.push_back(g->node_count);
    const int resolution = hgoe::graphon_resolution(node_counts, ec.graphon.resolution_cap,
                                                    ec.graphon.resolution_percentile);
    std::vector<hgoe::Graphon> graphons;
    for (const auto& member_ids : assignment.members()) {
      std::vector<const hgoe::Graph*> members;
      for (const int m : member_ids) members.push_back(prep.train_refs[static_cast<std::size_t>(m)]);
      graphons.push_back(hgoe::estimate_graphon_usvt(members, resolution,
                                                     ec.graphon.svt_coefficient,
                                                     ec.graphon.alignment));
    }
    const fs::path graphon_dir = out_dir / "graphons";
    fs::create_directories(graphon_dir);
    for (std::size_t i = 0; i < graphons.size(); ++i) {
      hgoe::GraphonExportMeta meta;
      meta.config_digest = digest;
      hgoe::export_graphon_heatmap(graphons[i],
                                   (graphon_dir / ("subgroup_" + std::to_string(i) + ".csv"))
                                       .string(),
                                   meta);
      hgoe::save_graphon_json(graphons[i],
                              (graphon_dir / ("subgroup_" + std::to_string(i) + ".json"))
                                  .string());
    }
    const double lambda_mid = 0.5 * (synth.lambda_lo + synth.lambda_hi);
    for (std::size_t i = 0; i < graphons.size(); ++i)
      for (std::size_t j = i + 1; j < graphons.size(); ++j) {
        hgoe::GraphonExportMeta meta;
        meta.config_digest = digest;
        meta.lambda = lambda_mid;
        meta.source_subgroups = {static_cast<int>(i), static_cast<int>(j)};
        hgoe::export_graphon_heatmap(
            hgoe::mixup_graphons(graphons[i], graphons[j], lambda_mid),
            (graphon_dir / ("mixup_" + std::to_string(i) + "_" + std::to_string(j) + ".csv"))
                .string(),
            meta);
      }
    const hgoe::PoolFeatureCache cache = hgoe::PoolFeatureCache::build(pool, synth.d_s, jobs);
    internal = hgoe::generate_internal_outliers(graphons, n_int, synth, pool, &cache, jobs);
  }
  const hgoe::OutlierSet oe_set = hgoe::assemble_oe_set(pool, std::move(internal), synth);
  hgoe::save_outlier_set(oe_set, "oe-" + bundle.id.name, (out_dir / "oe_set.json").string(),
                         digest);
  std::printf("oe set: %d external + %d internal -> %s\n", oe_set.external_count,
              oe_set.internal_count, (out_dir / "oe_set.json").string().c_str());
  (void)n_ext;
  return 0;
}

int cmd_train(const CliOptions& options) {
  const json config = load_config(options);
  const std::string digest = config_digest(config);
  const fs::path out_dir = ensure_output_dir(options);
  const hgoe::DatasetBundle bundle = resolve_bundle(config);
  hgoe::ExperimentConfig ec = bind_names(experiment_from_json(config), bundle);
  ec.seeds.resize(1);
  const int jobs = effective_jobs(options);

  hgoe::ArtifactCallback sink = [&](const hgoe::SeedArtifacts& artifacts) {
    hgoe::save_checkpoint(*artifacts.model, hgoe::apply_ablation(ec).loss, digest,
                          (out_dir / "checkpoint.json").string());
    hgoe::write_loss_history_csv(*artifacts.train_state,
                                 (out_dir / "loss_history.csv").string(), digest);
  };
  const hgoe::SeedResult result = hgoe::run_single_seed(ec, bundle, ec.seeds.front(), sink, jobs);
  std::printf("trained seed %llu: test auc %.4f, checkpoint -> %s\n",
              static_cast<unsigned long long>(result.seed), result.auc,
              (out_dir / "checkpoint.json").string().c_str());
  return 0;
}

int cmd_eval(const CliOptions& options, const std::string& checkpoint_path) {
  const json config = load_config(options);
  const std::string digest = config_digest(config);
  const fs::path out_dir = ensure_output_dir(options);
  const hgoe::DatasetBundle bundle = resolve_bundle(config);
  const hgoe::ExperimentConfig ec = bind_names(experiment_from_json(config), bundle);

  const hgoe::ScoringModel model = hgoe::load_checkpoint(checkpoint_path);
  const std::uint64_t seed = ec.seeds.front();
  const hgoe::SplitSpec split = hgoe::split_in_distribution(bundle.id, ec.train_fraction, seed);
  std::vector<hgoe::Graph> id_test;
  for (const int idx : split.test_id)
    id_test.push_back(bundle.id.graphs[static_cast<std::size_t>(idx)]);
  const hgoe::LabeledTestSet test = hgoe::assemble_test_set(id_test, bundle.ood, seed);

  std::vector<hgoe::ScoreRecord> records = hgoe::score_dataset(model, test.graphs);
  std::vector<double> scores;
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].label = test.labels[i];
    scores.push_back(records[i].normalized);
  }
  const double auc_value = hgoe::auc(scores, test.labels);
  hgoe::export_score_histogram(records, ec.histogram_bins,
                               (out_dir / "histogram.csv").string(), digest);
  json doc;
  doc["config_digest"] = digest;
  doc["auc"] = auc_value;
  doc["n_test"] = records.size();
  doc["seed"] = seed;
  write_json_file(doc, out_dir / "eval.json");
  std::printf("auc %.4f over %zu test graphs -> %s\n", auc_value, records.size(),
              (out_dir / "eval.json").string().c_str());
  return 0;
}

void run_one_report(const hgoe::ExperimentConfig& ec, const hgoe::DatasetBundle& bundle,
                    const std::string& digest, const fs::path& out_dir,
                    const std::string& label, int jobs, int histogram_bins,
                    std::vector<std::pair<std::string, hgoe::ExperimentReport>>& rows) {
  hgoe::ArtifactCallback sink = [&](const hgoe::SeedArtifacts& artifacts) {
    const std::string suffix =
        (label.empty() ? std::string{} : label + "_") + std::to_string(artifacts.seed);
    hgoe::export_score_histogram(*artifacts.records, histogram_bins,
                                 (out_dir / ("histogram_" + suffix + ".csv")).string(), digest);
  };
  const hgoe::ExperimentReport report = hgoe::run_experiment(ec, bundle, digest, jobs, sink);
  const std::string stem = label.empty() ? "report" : "report_" + label;
  hgoe::write_report_json(report, (out_dir / (stem + ".json")).string());
  hgoe::write_timings_json(report, (out_dir / (stem + ".timings.json")).string());
  rows.emplace_back(label.empty() ? "full" : label, report);
}

int cmd_run(const CliOptions& options) {
  const json config = load_config(options);
  const std::string digest = config_digest(config);
  const fs::path out_dir = ensure_output_dir(options);
  const hgoe::DatasetBundle bundle = resolve_bundle(config);
  const hgoe::ExperimentConfig ec = bind_names(experiment_from_json(config), bundle);
  const int jobs = effective_jobs(options);

  std::vector<std::pair<std::string, hgoe::ExperimentReport>> rows;
  if (ec.ablation == hgoe::Ablation::gamma_sweep ||
      ec.ablation == hgoe::Ablation::lambda_range_sweep) {
    const std::string grid =
        ec.ablation == hgoe::Ablation::gamma_sweep ? "gamma" : "lambda_range";
    for (const auto& [label, grid_config] : hgoe::ablation_grid(ec, grid))
      run_one_report(grid_config, bundle, digest, out_dir, label, jobs, ec.histogram_bins, rows);
  } else {
    run_one_report(ec, bundle, digest, out_dir, "", jobs, ec.histogram_bins, rows);
  }

  const std::string table = hgoe::format_summary_table(rows);
  std::ofstream summary(out_dir / "summary.txt");
  summary << "config_digest " << digest << "\n" << table;
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_ablate(const CliOptions& options, const std::string& grid) {
  const json config = load_config(options);
  const std::string digest = config_digest(config);
  const fs::path out_dir = ensure_output_dir(options);
  const hgoe::DatasetBundle bundle = resolve_bundle(config);
  const hgoe::ExperimentConfig ec = bind_names(experiment_from_json(config), bundle);
  const int jobs = effective_jobs(options);

  std::vector<std::pair<std::string, hgoe::ExperimentReport>> rows;
  for (const auto& [label, grid_config] : hgoe::ablation_grid(ec, grid))
    run_one_report(grid_config, bundle, digest, out_dir, label, jobs, ec.histogram_bins, rows);

  const std::string table = hgoe::format_summary_table(rows);
  std::ofstream summary(out_dir / "summary.txt");
  summary << "config_digest " << digest << "\n" << table;
  std::fputs(table.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid graph outlier exposure for graph-level OOD detection"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions options;
  app.add_option("--config", options.config_path, "JSON config file");
  app.add_option("--set", options.overrides, "override a config key (KEY=VALUE, repeatable)");
  app.add_option("--output", options.output_dir, "output directory");
  app.add_option("--jobs", options.jobs, "parallel jobs (default: hardware threads)");
  app.add_option("--seed-list", options.seed_list, "comma-separated seeds, overrides config");
  app.add_option("--benchmark", options.benchmark, "use a bundled benchmark ('sbm')");
  app.add_flag("-v,--verbose", options.verbose, "verbose logging");

  auto* ingest = app.add_subcommand("ingest", "read TU/JSON data, write validated JSON datasets");
  std::string tu_dir, tu_name, json_path, feature_policy = "label_one_hot";
  ingest->add_option("--tu", tu_dir, "TU dataset directory");
  ingest->add_option("--name", tu_name, "TU dataset name");
  ingest->add_option("--feature-policy", feature_policy,
                     "fallback features: label_one_hot | constant_one");
  ingest->add_option("--json", json_path, "JSON dataset to validate and rewrite");

  auto* subgroups = app.add_subcommand("subgroups", "embed training graphs and cluster them");
  auto* synth = app.add_subcommand("synth", "build outlier pools and synthesize internal outliers");
  auto* train = app.add_subcommand("train", "fit the scoring model, write checkpoint");
  auto* eval = app.add_subcommand("eval", "score the test set with a checkpoint");
  std::string checkpoint_path;
  eval->add_option("--checkpoint", checkpoint_path, "model checkpoint JSON")->required();
  auto* run = app.add_subcommand("run", "full pipeline per experiment config");
  auto* ablate = app.add_subcommand("ablate", "run an ablation grid");
  std::string grid = "oe";
  ablate->add_option("--grid", grid, "gamma | tau | lambda_range | oe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed())
      return cmd_ingest(options, tu_dir, tu_name, feature_policy, json_path);
    if (subgroups->parsed()) return cmd_subgroups(options);
    if (synth->parsed()) return cmd_synth(options);
    if (train->parsed()) return cmd_train(options);
    if (eval->parsed()) return cmd_eval(options, checkpoint_path);
    if (run->parsed()) return cmd_run(options);
    if (ablate->parsed()) return cmd_ablate(options, grid);
  } catch (const hgoe::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const hgoe::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
