#include "hgoe/benchmark.hpp"

#include "hgoe/rng.hpp"

namespace hgoe {
namespace {

// Two equal blocks in node order: the first half of the nodes is block 0.
Graph sample_block_graph(int n, double p_in, double p_out, int feature_dim, Rng& rng,
                         const std::string& source, int graph_id) {
  Graph g;
  g.node_count = n;
  g.source_dataset = source;
  g.graph_id = graph_id;
  const int half = n / 2;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool same_block = (i < half) == (j < half);
      if (rng.uniform() < (same_block ? p_in : p_out)) g.edges.emplace_back(i, j);
    }
  g.features.resize(n, feature_dim);
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < feature_dim; ++f) g.features(i, f) = rng.uniform();
  return g;
}

}  // namespace

DatasetBundle make_sbm_benchmark(const SbmBenchmarkConfig& config) {
  DatasetBundle bundle;
  bundle.id.name = "sbm-id";
  bundle.ood.name = "sbm-ood";
  bundle.id.feature_dim = config.feature_dim;
  bundle.ood.feature_dim = config.feature_dim;

  Rng id_rng(Rng::derive(config.seed, "benchmark-id"));
  for (int i = 0; i < config.id_count; ++i) {
    const int n = static_cast<int>(id_rng.uniform_int(config.min_nodes, config.max_nodes));
    const bool first_subgroup = i % 2 == 0;
    bundle.id.graphs.push_back(sample_block_graph(
        n, first_subgroup ? config.subgroup_a_in : config.subgroup_b_in,
        first_subgroup ? config.subgroup_a_out : config.subgroup_b_out, config.feature_dim,
        id_rng, bundle.id.name, i));
  }

  Rng ood_rng(Rng::derive(config.seed, "benchmark-ood"));
  for (int i = 0; i < config.ood_count; ++i) {
    const int n = static_cast<int>(ood_rng.uniform_int(config.min_nodes, config.max_nodes));
    bundle.ood.graphs.push_back(sample_block_graph(n, config.ood_p, config.ood_p,
                                                   config.feature_dim, ood_rng, bundle.ood.name,
                                                   i));
  }

  GraphDataset aux;
  aux.name = "sbm-aux";
  aux.feature_dim = config.feature_dim;
  Rng aux_rng(Rng::derive(config.seed, "benchmark-aux"));
  for (int i = 0; i < config.aux_count; ++i) {
    const int n = static_cast<int>(aux_rng.uniform_int(config.min_nodes, config.max_nodes));
    const double p = aux_rng.uniform(config.aux_p_lo, config.aux_p_hi);
    aux.graphs.push_back(
        sample_block_graph(n, p, p, config.feature_dim, aux_rng, aux.name, i));
  }
  bundle.auxiliary.push_back(std::move(aux));
  return bundle;
}

}  // namespace hgoe
