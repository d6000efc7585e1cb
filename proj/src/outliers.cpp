#include "hgoe/outliers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "hgoe/diffusion.hpp"
#include "hgoe/error.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {

OutlierPool build_external_pool(const std::vector<GraphDataset>& all_datasets,
                                const std::string& id_name, const std::string& ood_name,
                                int feature_dim) {
  OutlierPool pool;
  pool.feature_dim = feature_dim;
  pool.excluded_names = {id_name, ood_name};
  for (const GraphDataset& ds : all_datasets) {
    if (ds.name == id_name || ds.name == ood_name) continue;
    if (ds.feature_dim != feature_dim) continue;
    for (const Graph& g : ds.graphs) pool.graphs.push_back(g);
  }
  if (pool.graphs.empty())
    throw DataError("external pool is empty: no auxiliary dataset with feature_dim " +
                    std::to_string(feature_dim) + " besides '" + id_name + "'/'" + ood_name +
                    "'; supply auxiliary datasets");
  return pool;
}

PoolFeatureCache PoolFeatureCache::build(const OutlierPool& pool, int d_s, int jobs) {
  PoolFeatureCache cache;
  cache.d_s = d_s;
  std::size_t total_nodes = 0;
  for (const Graph& g : pool.graphs) total_nodes += static_cast<std::size_t>(g.node_count);
  cache.diffusion.resize(static_cast<Eigen::Index>(total_nodes), d_s);
  cache.node_ref.resize(total_nodes);

  std::vector<Eigen::Index> offsets(pool.graphs.size());
  Eigen::Index at = 0;
  for (std::size_t gi = 0; gi < pool.graphs.size(); ++gi) {
    offsets[gi] = at;
    at += pool.graphs[gi].node_count;
  }

  const int n_graphs = static_cast<int>(pool.graphs.size());
  jobs = std::max(1, std::min(jobs, n_graphs));
  auto work = [&](int gi) {
    const Graph& g = pool.graphs[static_cast<std::size_t>(gi)];
    const StructuralFeatures feats = diffusion_node_features(g, d_s);
    const Eigen::Index base = offsets[static_cast<std::size_t>(gi)];
    cache.diffusion.middleRows(base, g.node_count) = feats.matrix;
    for (int v = 0; v < g.node_count; ++v)
      cache.node_ref[static_cast<std::size_t>(base + v)] = {gi, v};
  };
  if (jobs == 1) {
    for (int gi = 0; gi < n_graphs; ++gi) work(gi);
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (int gi = cursor.fetch_add(1); gi < n_graphs; gi = cursor.fetch_add(1)) work(gi);
      });
    for (auto& t : workers) t.join();
  }
  return cache;
}

Eigen::MatrixXd align_features(int node_count, const std::vector<std::pair<int, int>>& edges,
                               const OutlierPool& pool, const PoolFeatureCache& cache) {
  if (pool.graphs.empty() || cache.diffusion.rows() == 0)
    throw DataError("align_features: empty pool");
  const StructuralFeatures feats = diffusion_node_features(node_count, edges, cache.d_s);

  Eigen::MatrixXd out(node_count, pool.feature_dim);
  const Eigen::Index pool_nodes = cache.diffusion.rows();
  for (int v = 0; v < node_count; ++v) {
    // Strict < scan in cache order realizes the (graph, node) tie-break.
    Eigen::Index best = 0;
    double best_d = (cache.diffusion.row(0) - feats.matrix.row(v)).squaredNorm();
    for (Eigen::Index j = 1; j < pool_nodes; ++j) {
      const double d = (cache.diffusion.row(j) - feats.matrix.row(v)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    const auto [gi, node] = cache.node_ref[static_cast<std::size_t>(best)];
    out.row(v) = pool.graphs[static_cast<std::size_t>(gi)].features.row(node);
  }
  return out;
}

Eigen::MatrixXd align_features(int node_count, const std::vector<std::pair<int, int>>& edges,
                               const OutlierPool& pool, int d_s) {
  return align_features(node_count, edges, pool, PoolFeatureCache::build(pool, d_s));
}

void SynthesisConfig::validate() const {
  if (!(lambda_lo >= 0.0 && lambda_hi <= 1.0 && lambda_lo <= lambda_hi))
    throw DataError("synthesis: lambda range must satisfy 0 <= lo <= hi <= 1");
  if (ratio_external < 0 || ratio_internal < 0 || ratio_external + ratio_internal == 0)
    throw DataError("synthesis: invalid external:internal ratio");
  if (d_s < 1) throw DataError("synthesis: d_s must be >= 1");
}

std::vector<Graph> generate_internal_outliers(const std::vector<Graphon>& subgroup_graphons,
                                              int count, const SynthesisConfig& config,
                                              const OutlierPool& pool,
                                              const PoolFeatureCache* cache, int jobs) {
  config.validate();
  if (count < 1) throw DataError("generate_internal_outliers: count must be >= 1");
  if (subgroup_graphons.size() < 2)
    throw DataError("generate_internal_outliers: need at least 2 subgroups to mix");
  const int resolution = subgroup_graphons.front().resolution;
  for (const Graphon& w : subgroup_graphons)
    if (w.resolution != resolution)
      throw DataError("generate_internal_outliers: subgroup graphons disagree on resolution");

  PoolFeatureCache local_cache;
  if (cache == nullptr) {
    local_cache = PoolFeatureCache::build(pool, config.d_s, jobs);
    cache = &local_cache;
  }

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < subgroup_graphons.size(); ++i)
    for (std::size_t j = i + 1; j < subgroup_graphons.size(); ++j)
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));

  const std::uint64_t base_seed = Rng::derive(config.seed, "synth");
  std::vector<Graph> out(static_cast<std::size_t>(count));
  auto make_one = [&](int t) {
    const auto [i, j] = pairs[static_cast<std::size_t>(t) % pairs.size()];
    Rng rng(Rng::derive(base_seed, static_cast<std::uint64_t>(t)));
    const double lambda = rng.uniform(config.lambda_lo, config.lambda_hi);
    const Graphon mixed = mixup_graphons(subgroup_graphons[static_cast<std::size_t>(i)],
                                         subgroup_graphons[static_cast<std::size_t>(j)], lambda);
    const int r = static_cast<int>(rng.uniform_int(2, resolution));
    const Eigen::MatrixXd probs = downsample_graphon(mixed, r, rng);
    SampledStructure structure = bernoulli_sample(probs, rng);

    Graph g;
    g.node_count = structure.node_count;
    g.edges = std::move(structure.edges);
    g.features = align_features(g.node_count, g.edges, pool, *cache);
    g.source_dataset = "mixup(" + std::to_string(i) + "," + std::to_string(j) + ")";
    g.graph_id = t;
    out[static_cast<std::size_t>(t)] = std::move(g);
  };

  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int t = 0; t < count; ++t) make_one(t);
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (int t = cursor.fetch_add(1); t < count; t = cursor.fetch_add(1)) make_one(t);
      });
    for (auto& t : workers) t.join();
  }
  return out;
}

std::pair<int, int> oe_counts(const SynthesisConfig& config) {
  config.validate();
  const double share = static_cast<double>(config.ratio_external) /
                       static_cast<double>(config.ratio_external + config.ratio_internal);
  const int n_ext = static_cast<int>(std::llround(share * config.total_count));
  return {n_ext, config.total_count - n_ext};
}

OutlierSet assemble_oe_set(const OutlierPool& pool, std::vector<Graph> internal,
                           const SynthesisConfig& config) {
  const auto [n_ext, n_int] = oe_counts(config);
  if (static_cast<int>(pool.graphs.size()) < n_ext)
    throw DataError("assemble_oe_set: insufficient external graphs (need " +
                    std::to_string(n_ext) + ", pool has " + std::to_string(pool.graphs.size()) +
                    ")");
  if (static_cast<int>(internal.size()) < n_int)
    throw DataError("assemble_oe_set: insufficient internal graphs (need " +
                    std::to_string(n_int) + ", got " + std::to_string(internal.size()) + ")");

  OutlierSet set;
  set.external_count = n_ext;
  set.internal_count = n_int;

  Rng pick_rng(Rng::derive(config.seed, "oe-external"));
  const std::vector<int> picks =
      pick_rng.sample_without_replacement(static_cast<int>(pool.graphs.size()), n_ext);
  std::vector<std::pair<Graph, OutlierOrigin>> tagged;
  tagged.reserve(static_cast<std::size_t>(n_ext + n_int));
  for (const int idx : picks)
    tagged.emplace_back(pool.graphs[static_cast<std::size_t>(idx)], OutlierOrigin::external);
  for (int i = 0; i < n_int; ++i)
    tagged.emplace_back(std::move(internal[static_cast<std::size_t>(i)]),
                        OutlierOrigin::internal);

  Rng shuffle_rng(Rng::derive(config.seed, "oe-shuffle"));
  std::vector<int> order = shuffle_rng.permutation(static_cast<int>(tagged.size()));
  for (const int idx : order) {
    set.graphs.push_back(std::move(tagged[static_cast<std::size_t>(idx)].first));
    set.origins.push_back(tagged[static_cast<std::size_t>(idx)].second);
  }
  return set;
}

}  // namespace hgoe
