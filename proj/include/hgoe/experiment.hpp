#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hgoe/detector.hpp"
#include "hgoe/embedding.hpp"
#include "hgoe/graph.hpp"
#include "hgoe/graphon.hpp"
#include "hgoe/kmeans.hpp"
#include "hgoe/outliers.hpp"
#include "hgoe/reporting.hpp"

namespace hgoe {

enum class Ablation {
  full,
  no_internal,   // external outliers only (ratio 1:0)
  no_external,   // internal outliers only (ratio 0:1)
  no_oe,         // beta = 0, no outlier exposure at all
  tau_min,
  tau_mean,
  tau_max,
  tau_none,
  gamma_sweep,
  lambda_range_sweep,
};

Ablation ablation_from_string(const std::string& name);
std::string to_string(Ablation ablation);

struct ClusterConfig {
  int k = 3;
  int max_iter = 100;
  double rel_tol = 1e-4;
};

struct GraphonConfig {
  int resolution_cap = 200;
  double resolution_percentile = 0.9;
  std::optional<double> svt_coefficient;  // absolute override of the auto rule
  GraphonAlignment alignment = GraphonAlignment::order_preserving;
};

struct SynthesisSettings {
  double lambda_lo = 0.01;
  double lambda_hi = 1.0;
  int ratio_external = 1;
  int ratio_internal = 1;
  std::optional<int> total_count;  // defaults to |ID train|
};

struct TrainingConfig {
  int hidden_dim = 32;
  double learning_rate = 1e-2;
  int batch_size = 64;
  int epochs = 100;
};

struct ExperimentConfig {
  std::string id_dataset;
  std::string ood_dataset;
  std::vector<std::string> auxiliary_datasets;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double train_fraction = 0.9;
  EmbeddingConfig embedding;
  ClusterConfig cluster;
  GraphonConfig graphon;
  SynthesisSettings synthesis;
  LossParams loss;
  TrainingConfig training;
  int histogram_bins = 20;
  Ablation ablation = Ablation::full;

  void validate() const;
};

// Resolves scalar ablations (ratio wiring, beta, tau strategy) into a
// concrete config; sweeps are expanded by ablation_grid instead.
ExperimentConfig apply_ablation(const ExperimentConfig& config);

struct DatasetBundle {
  GraphDataset id;
  GraphDataset ood;
  std::vector<GraphDataset> auxiliary;
};

// Per-seed artifacts, offered to the caller before they go out of scope.
struct SeedArtifacts {
  std::uint64_t seed = 0;
  const std::vector<Graphon>* subgroup_graphons = nullptr;  // null when not synthesized
  const SubgroupAssignment* subgroups = nullptr;
  const OutlierSet* oe_set = nullptr;
  const ScoringModel* model = nullptr;
  const TrainState* train_state = nullptr;
  const std::vector<ScoreRecord>* records = nullptr;
};
using ArtifactCallback = std::function<void(const SeedArtifacts&)>;

// Full pipeline for one seed: split, embed, subgroup, estimate, synthesize,
// train, score. Deterministic given (config, bundle, seed).
SeedResult run_single_seed(const ExperimentConfig& config, const DatasetBundle& bundle,
                           std::uint64_t seed, const ArtifactCallback& on_artifacts = nullptr,
                           int jobs = 1);

// Runs every configured seed (in parallel up to `jobs`), aggregates mean and
// std. A seed that fails is dropped with a note on stderr; at least one seed
// must succeed.
ExperimentReport run_experiment(const ExperimentConfig& config, const DatasetBundle& bundle,
                                const std::string& config_digest, int jobs = 1,
                                const ArtifactCallback& on_artifacts = nullptr);

// Grid expansion for `ablate`; grid is one of "gamma", "tau", "lambda_range",
// "oe". The sweep ablations map onto their grids.
std::vector<std::pair<std::string, ExperimentConfig>> ablation_grid(
    const ExperimentConfig& base, const std::string& grid);

}  // namespace hgoe
