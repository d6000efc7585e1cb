#include "hgoe/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "hgoe/error.hpp"
#include "hgoe/metrics.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {

Ablation ablation_from_string(const std::string& name) {
  if (name == "full") return Ablation::full;
  if (name == "no_internal") return Ablation::no_internal;
  if (name == "no_external") return Ablation::no_external;
  if (name == "no_oe") return Ablation::no_oe;
  if (name == "tau_min") return Ablation::tau_min;
  if (name == "tau_mean") return Ablation::tau_mean;
  if (name == "tau_max") return Ablation::tau_max;
  if (name == "tau_none") return Ablation::tau_none;
  if (name == "gamma_sweep") return Ablation::gamma_sweep;
  if (name == "lambda_range_sweep") return Ablation::lambda_range_sweep;
  throw DataError("unknown ablation '" + name + "'");
}

std::string to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::full: return "full";
    case Ablation::no_internal: return "no_internal";
    case Ablation::no_external: return "no_external";
    case Ablation::no_oe: return "no_oe";
    case Ablation::tau_min: return "tau_min";
    case Ablation::tau_mean: return "tau_mean";
    case Ablation::tau_max: return "tau_max";
    case Ablation::tau_none: return "tau_none";
    case Ablation::gamma_sweep: return "gamma_sweep";
    case Ablation::lambda_range_sweep: return "lambda_range_sweep";
  }
  return "full";
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw DataError("config: at least one seed required");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("config: train_fraction must lie in (0, 1)");
  if (!id_dataset.empty() && id_dataset == ood_dataset)
    throw DataError("config: id and ood datasets must differ");
  loss.validate();
  if (training.epochs < 0 || training.batch_size < 1 || training.hidden_dim < 1)
    throw DataError("config: invalid training settings");
  if (cluster.k < 1) throw DataError("config: cluster k must be >= 1");
}

ExperimentConfig apply_ablation(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  switch (config.ablation) {
    case Ablation::full: break;
    case Ablation::no_internal:
      out.synthesis.ratio_external = 1;
      out.synthesis.ratio_internal = 0;
      break;
    case Ablation::no_external:
      out.synthesis.ratio_external = 0;
      out.synthesis.ratio_internal = 1;
      break;
    case Ablation::no_oe:
      out.loss.beta = 0.0;
      break;
    case Ablation::tau_min: out.loss.tau_strategy = TauStrategy::min; break;
    case Ablation::tau_mean: out.loss.tau_strategy = TauStrategy::mean; break;
    case Ablation::tau_max: out.loss.tau_strategy = TauStrategy::max; break;
    case Ablation::tau_none: out.loss.tau_strategy = TauStrategy::none; break;
    case Ablation::gamma_sweep:
    case Ablation::lambda_range_sweep:
      throw DataError("sweep ablation '" + to_string(config.ablation) +
                      "' must run through ablation_grid");
  }
  return out;
}

SeedResult run_single_seed(const ExperimentConfig& raw_config, const DatasetBundle& bundle,
                           std::uint64_t seed, const ArtifactCallback& on_artifacts, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = apply_ablation(raw_config);
  config.validate();
  bundle.id.validate();
  bundle.ood.validate();

  const SplitSpec split = split_in_distribution(bundle.id, config.train_fraction, seed);
  std::vector<const Graph*> train_refs;
  train_refs.reserve(split.train.size());
  for (const int idx : split.train)
    train_refs.push_back(&bundle.id.graphs[static_cast<std::size_t>(idx)]);

  EmbeddingConfig emb_config = config.embedding;
  emb_config.feature_dim = bundle.id.feature_dim;
  const Eigen::MatrixXd id_embeddings = embed_graphs(train_refs, emb_config, jobs);

  SynthesisConfig synth;
  synth.lambda_lo = config.synthesis.lambda_lo;
  synth.lambda_hi = config.synthesis.lambda_hi;
  synth.ratio_external = config.synthesis.ratio_external;
  synth.ratio_internal = config.synthesis.ratio_internal;
  synth.total_count = config.synthesis.total_count.value_or(static_cast<int>(train_refs.size()));
  synth.d_s = config.embedding.d_s;
  synth.seed = Rng::derive(seed, "synthesis");

  // Outlier exposure stage. Skipped entirely when beta is zero or no outliers
  // are requested; every stage draws from its own derived stream, so skipping
  // one stage never shifts another.
  std::optional<SubgroupAssignment> subgroups;
  std::vector<Graphon> subgroup_graphons;
  std::optional<OutlierSet> oe_set;
  Eigen::MatrixXd oe_embeddings(0, emb_config.dim());
  const bool use_oe = config.loss.beta > 0.0 && synth.total_count > 0;
  if (use_oe) {
    std::vector<GraphDataset> all_datasets;
    all_datasets.push_back(bundle.id);
    all_datasets.push_back(bundle.ood);
    for (const GraphDataset& aux : bundle.auxiliary) all_datasets.push_back(aux);
    const OutlierPool pool = build_external_pool(all_datasets, bundle.id.name, bundle.ood.name,
                                                 bundle.id.feature_dim);

    std::vector<Graph> internal;
    const auto [n_ext, n_int] = oe_counts(synth);
    (void)n_ext;
    if (n_int > 0) {
      subgroups = kmeans(id_embeddings, config.cluster.k, Rng::derive(seed, "cluster"),
                         config.cluster.max_iter, config.cluster.rel_tol);
      std::vector<int> node_counts;
      node_counts.reserve(train_refs.size());
      for (const Graph* g : train_refs) node_counts.push_back(g->node_count);
      const int resolution =
          graphon_resolution(node_counts, config.graphon.resolution_cap,
                             config.graphon.resolution_percentile);
      for (const auto& member_ids : subgroups->members()) {
        std::vector<const Graph*> members;
        members.reserve(member_ids.size());
        for (const int m : member_ids) members.push_back(train_refs[static_cast<std::size_t>(m)]);
        subgroup_graphons.push_back(estimate_graphon_usvt(
            members, resolution, config.graphon.svt_coefficient, config.graphon.alignment));
      }
      const PoolFeatureCache cache = PoolFeatureCache::build(pool, synth.d_s, jobs);
      internal = generate_internal_outliers(subgroup_graphons, n_int, synth, pool, &cache, jobs);
    }
    oe_set = assemble_oe_set(pool, std::move(internal), synth);
    oe_embeddings = embed_graphs(oe_set->graphs, emb_config, jobs);
  }

  ScoringModel model = init_model(emb_config.dim(), config.training.hidden_dim,
                                  Rng::derive(seed, "model"), id_embeddings, emb_config);
  TrainConfig train_config;
  train_config.epochs = config.training.epochs;
  train_config.learning_rate = config.training.learning_rate;
  train_config.batch_size = config.training.batch_size;
  train_config.seed = Rng::derive(seed, "train");
  const TrainState state = train(model, id_embeddings, oe_embeddings, config.loss, train_config);

  std::vector<Graph> id_test;
  id_test.reserve(split.test_id.size());
  for (const int idx : split.test_id)
    id_test.push_back(bundle.id.graphs[static_cast<std::size_t>(idx)]);
  const LabeledTestSet test = assemble_test_set(id_test, bundle.ood, seed);

  SeedResult result;
  result.seed = seed;
  result.records = score_dataset(model, test.graphs);
  std::vector<double> scores;
  scores.reserve(result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    result.records[i].label = test.labels[i];
    scores.push_back(result.records[i].normalized);
  }
  result.auc = auc(scores, test.labels);
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (on_artifacts) {
    SeedArtifacts artifacts;
    artifacts.seed = seed;
    artifacts.subgroup_graphons = subgroup_graphons.empty() ? nullptr : &subgroup_graphons;
    artifacts.subgroups = subgroups.has_value() ? &*subgroups : nullptr;
    artifacts.oe_set = oe_set.has_value() ? &*oe_set : nullptr;
    artifacts.model = &model;
    artifacts.train_state = &state;
    artifacts.records = &result.records;
    on_artifacts(artifacts);
  }
  return result;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const DatasetBundle& bundle,
                                const std::string& config_digest, int jobs,
                                const ArtifactCallback& on_artifacts) {
  config.validate();
  const int n_seeds = static_cast<int>(config.seeds.size());
  jobs = std::max(1, jobs);
  const int seed_jobs = std::min(jobs, n_seeds);
  const int inner_jobs = std::max(1, jobs / seed_jobs);

  std::vector<SeedResult> results;
  std::vector<std::string> failures;
  std::mutex mutex;
  std::atomic<int> cursor{0};
  auto worker = [&] {
    for (int i = cursor.fetch_add(1); i < n_seeds; i = cursor.fetch_add(1)) {
      const std::uint64_t seed = config.seeds[static_cast<std::size_t>(i)];
      try {
        ArtifactCallback guarded;
        if (on_artifacts)
          guarded = [&](const SeedArtifacts& a) {
            std::scoped_lock lock(mutex);
            on_artifacts(a);
          };
        SeedResult r = run_single_seed(config, bundle, seed, guarded, inner_jobs);
        std::scoped_lock lock(mutex);
        results.push_back(std::move(r));
      } catch (const std::exception& e) {
        std::scoped_lock lock(mutex);
        failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  };
  if (seed_jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < seed_jobs; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  for (const std::string& f : failures) std::cerr << "[hgoe] seed failed: " << f << "\n";
  if (results.empty())
    throw Error("run_experiment: every seed failed" +
                (failures.empty() ? std::string{} : "; first: " + failures.front()));
  return summarize(config_digest, std::move(results));
}

std::vector<std::pair<std::string, ExperimentConfig>> ablation_grid(
    const ExperimentConfig& base, const std::string& grid) {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  auto label_number = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  if (grid == "gamma") {
    for (const double gamma : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
      ExperimentConfig c = base;
      c.ablation = Ablation::full;
      c.loss.gamma = gamma;
      out.emplace_back("gamma_" + label_number(gamma), std::move(c));
    }
  } else if (grid == "tau") {
    for (const TauStrategy strategy :
         {TauStrategy::min, TauStrategy::mean, TauStrategy::max, TauStrategy::none}) {
      ExperimentConfig c = base;
      c.ablation = Ablation::full;
      c.loss.tau_strategy = strategy;
      out.emplace_back("tau_" + to_string(strategy), std::move(c));
    }
  } else if (grid == "lambda_range") {
    const std::pair<double, double> ranges[] = {{0.01, 1.0}, {0.1, 0.9}, {0.3, 0.7}, {0.4, 0.6}};
    for (const auto& [lo, hi] : ranges) {
      ExperimentConfig c = base;
      c.ablation = Ablation::full;
      c.synthesis.lambda_lo = lo;
      c.synthesis.lambda_hi = hi;
      out.emplace_back("lambda_" + label_number(lo) + "_" + label_number(hi), std::move(c));
    }
  } else if (grid == "oe") {
    for (const Ablation ablation :
         {Ablation::full, Ablation::no_internal, Ablation::no_external, Ablation::no_oe}) {
      ExperimentConfig c = base;
      c.ablation = ablation;
      out.emplace_back(to_string(ablation), std::move(c));
    }
  } else {
    throw DataError("unknown ablation grid '" + grid +
                    "' (expected gamma, tau, lambda_range or oe)");
  }
  return out;
}

}  // namespace hgoe
