#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "hgoe/graph.hpp"
#include "hgoe/graphon.hpp"

namespace hgoe {

// Auxiliary graphs eligible as external outliers: matching feature dimension,
// never drawn from the ID or test-OOD dataset.
struct OutlierPool {
  std::vector<Graph> graphs;
  int feature_dim = 0;
  std::set<std::string> excluded_names;
};

OutlierPool build_external_pool(const std::vector<GraphDataset>& all_datasets,
                                const std::string& id_name, const std::string& ood_name,
                                int feature_dim);

// Diffusion features of every pool node, computed once; alignment is then a
// plain nearest-neighbor search over the cached rows.
struct PoolFeatureCache {
  Eigen::MatrixXd diffusion;                 // total pool nodes x d_s
  std::vector<std::pair<int, int>> node_ref;  // (pool graph index, node index)
  int d_s = 0;

  static PoolFeatureCache build(const OutlierPool& pool, int d_s, int jobs = 1);
};

// For each node of the sampled structure, copies the feature row of the pool
// node nearest in diffusion space (Euclidean); ties resolve to the smallest
// (pool graph index, node index).
Eigen::MatrixXd align_features(int node_count, const std::vector<std::pair<int, int>>& edges,
                               const OutlierPool& pool, const PoolFeatureCache& cache);
Eigen::MatrixXd align_features(int node_count, const std::vector<std::pair<int, int>>& edges,
                               const OutlierPool& pool, int d_s);

struct SynthesisConfig {
  double lambda_lo = 0.01;
  double lambda_hi = 1.0;
  int total_count = 0;
  int ratio_external = 1;
  int ratio_internal = 1;
  int d_s = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

// Round-robin over subgroup pairs (i < j); per outlier: draw lambda, mix the
// pair's graphons, draw a size in [2, D], downsample, Bernoulli-sample and
// align features from the pool. Each outlier owns a private RNG stream
// derived from (seed, outlier index).
std::vector<Graph> generate_internal_outliers(const std::vector<Graphon>& subgroup_graphons,
                                              int count, const SynthesisConfig& config,
                                              const OutlierPool& pool,
                                              const PoolFeatureCache* cache = nullptr,
                                              int jobs = 1);

enum class OutlierOrigin { external, internal };

struct OutlierSet {
  std::vector<Graph> graphs;
  std::vector<OutlierOrigin> origins;
  int external_count = 0;
  int internal_count = 0;
};

// Deterministic sample of external graphs plus the synthesized internal ones,
// shuffled together. The external share is total * ratio_ext / (ratio_ext +
// ratio_int), rounded.
OutlierSet assemble_oe_set(const OutlierPool& pool, std::vector<Graph> internal,
                           const SynthesisConfig& config);

// External/internal counts implied by a config.
std::pair<int, int> oe_counts(const SynthesisConfig& config);

}  // namespace hgoe
