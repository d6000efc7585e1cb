#include "hgoe/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "hgoe/diffusion.hpp"
#include "hgoe/error.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Hashed WL subtree-label histogram. Labels start from degrees and refine as
// a stable hash of (own label, sorted neighbor labels); a node without
// neighbors keeps its label, so degenerate graphs concentrate all mass on the
// initial-label bucket. Counts from every refinement level are pooled.
std::vector<double> wl_histogram(const Graph& g, int iterations, int buckets) {
  const auto adj = g.adjacency_list();
  const int n = g.node_count;

  std::vector<std::uint64_t> label(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    label[static_cast<std::size_t>(v)] =
        Rng::fnv1a64("deg:" + std::to_string(adj[static_cast<std::size_t>(v)].size()));

  std::vector<double> counts(static_cast<std::size_t>(buckets), 0.0);
  auto tally = [&] {
    for (int v = 0; v < n; ++v)
      counts[static_cast<std::size_t>(label[static_cast<std::size_t>(v)] %
                                      static_cast<std::uint64_t>(buckets))] += 1.0;
  };

  tally();
  std::vector<std::uint64_t> next(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> nbr_labels;
  for (int it = 0; it < iterations; ++it) {
    for (int v = 0; v < n; ++v) {
      const auto& nbrs = adj[static_cast<std::size_t>(v)];
      if (nbrs.empty()) {
        next[static_cast<std::size_t>(v)] = label[static_cast<std::size_t>(v)];
        continue;
      }
      nbr_labels.clear();
      for (const int u : nbrs) nbr_labels.push_back(label[static_cast<std::size_t>(u)]);
      std::sort(nbr_labels.begin(), nbr_labels.end());
      std::string key = hex64(label[static_cast<std::size_t>(v)]);
      key += '|';
      for (const std::uint64_t l : nbr_labels) {
        key += hex64(l);
        key += ',';
      }
      next[static_cast<std::size_t>(v)] = Rng::fnv1a64(key);
    }
    label.swap(next);
    tally();
  }

  const double total = static_cast<double>(n) * static_cast<double>(iterations + 1);
  for (double& c : counts) c /= total;
  return counts;
}

// Sorted accumulation keeps the column means exactly permutation-invariant.
double sorted_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

Eigen::VectorXd graph_summary_embedding(const Graph& g, const EmbeddingConfig& config) {
  if (config.wl_dim < 8) throw DataError("embedding: wl_dim must be >= 8");
  Eigen::VectorXd out(config.dim());
  int at = 0;

  for (const double c : wl_histogram(g, config.wl_iterations, config.wl_dim)) out[at++] = c;

  const StructuralFeatures diff = diffusion_node_features(g, config.d_s);
  std::vector<double> column(static_cast<std::size_t>(g.node_count));
  for (int k = 0; k < config.d_s; ++k) {
    for (int v = 0; v < g.node_count; ++v) column[static_cast<std::size_t>(v)] = diff.matrix(v, k);
    out[at + k] = sorted_mean(column);
    out[at + config.d_s + k] = diff.matrix.col(k).maxCoeff();
  }
  at += 2 * config.d_s;

  out[at++] = std::log1p(static_cast<double>(g.node_count));
  out[at++] = std::log1p(static_cast<double>(g.edge_count()));
  out[at++] = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count);
  return out;
}

Eigen::MatrixXd embed_graphs(const std::vector<const Graph*>& graphs,
                             const EmbeddingConfig& config, int jobs) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(graphs.size()), config.dim());
  const int n = static_cast<int>(graphs.size());
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) rows.row(i) = graph_summary_embedding(*graphs[static_cast<std::size_t>(i)], config);
    return rows;
  }
  std::vector<std::thread> workers;
  std::atomic<int> cursor{0};
  for (int w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (int i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1))
        rows.row(i) = graph_summary_embedding(*graphs[static_cast<std::size_t>(i)], config);
    });
  for (auto& t : workers) t.join();
  return rows;
}

Eigen::MatrixXd embed_graphs(const std::vector<Graph>& graphs, const EmbeddingConfig& config,
                             int jobs) {
  std::vector<const Graph*> refs;
  refs.reserve(graphs.size());
  for (const Graph& g : graphs) refs.push_back(&g);
  return embed_graphs(refs, config, jobs);
}

std::vector<std::string> embedding_column_names(const EmbeddingConfig& config) {
  std::vector<std::string> names;
  for (int i = 0; i < config.wl_dim; ++i) names.push_back("wl_" + std::to_string(i));
  for (int k = 1; k <= config.d_s; ++k) names.push_back("diff_mean_" + std::to_string(k));
  for (int k = 1; k <= config.d_s; ++k) names.push_back("diff_max_" + std::to_string(k));
  names.emplace_back("log_nodes");
  names.emplace_back("log_edges");
  names.emplace_back("mean_degree");
  return names;
}

void write_embeddings_csv(const std::string& path, const Eigen::MatrixXd& embeddings,
                          const std::vector<int>& graph_ids, const EmbeddingConfig& config,
                          const std::string& config_digest) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << "\n";
  out << "graph_id";
  for (const std::string& name : embedding_column_names(config)) out << ',' << name;
  out << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    out << graph_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", embeddings(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

}  // namespace hgoe
