#include "hgoe/graph.hpp"

#include <algorithm>
#include <cmath>

#include "hgoe/error.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {

std::vector<std::pair<int, int>> canonical_edges(int node_count,
                                                 std::vector<std::pair<int, int>> edges) {
  std::vector<std::pair<int, int>> out;
  out.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count)
      throw DataError("edge endpoint " + std::to_string(std::max(a, b)) +
                      " outside [0, " + std::to_string(node_count) + ")");
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    out.emplace_back(a, b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> degrees_of(int node_count, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> deg(static_cast<std::size_t>(node_count), 0);
  for (const auto& [a, b] : edges) {
    ++deg[static_cast<std::size_t>(a)];
    ++deg[static_cast<std::size_t>(b)];
  }
  return deg;
}

std::vector<std::vector<int>> adjacency_list_of(int node_count,
                                                const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count));
  for (const auto& [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

std::vector<int> Graph::degrees() const { return degrees_of(node_count, edges); }

std::vector<std::vector<int>> Graph::adjacency_list() const {
  return adjacency_list_of(node_count, edges);
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(node_count, node_count);
  for (const auto& [a, b] : edges) {
    adj(a, b) = 1.0;
    adj(b, a) = 1.0;
  }
  return adj;
}

void Graph::validate() const {
  if (node_count < 1) throw DataError("graph " + std::to_string(graph_id) + ": node_count < 1");
  if (features.rows() != node_count)
    throw DataError("graph " + std::to_string(graph_id) + ": feature rows " +
                    std::to_string(features.rows()) + " != node_count " +
                    std::to_string(node_count));
  if (features.cols() < 1)
    throw DataError("graph " + std::to_string(graph_id) + ": feature_dim < 1");
  if (!features.allFinite())
    throw DataError("graph " + std::to_string(graph_id) + ": non-finite feature");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& [a, b] = edges[i];
    if (a < 0 || b <= a || b >= node_count)
      throw DataError("graph " + std::to_string(graph_id) + ": non-canonical edge");
    if (i > 0 && !(edges[i - 1] < edges[i]))
      throw DataError("graph " + std::to_string(graph_id) + ": unsorted or duplicate edge");
  }
}

void GraphDataset::validate() const {
  if (feature_dim < 1) throw DataError("dataset " + name + ": feature_dim < 1");
  for (const Graph& g : graphs) {
    g.validate();
    if (g.feature_dim() != feature_dim)
      throw DataError("dataset " + name + ": graph " + std::to_string(g.graph_id) +
                      " feature_dim " + std::to_string(g.feature_dim()) + " != " +
                      std::to_string(feature_dim));
  }
}

double GraphDataset::mean_node_count() const {
  if (graphs.empty()) return 0.0;
  double total = 0.0;
  for (const Graph& g : graphs) total += g.node_count;
  return total / static_cast<double>(graphs.size());
}

SplitSpec split_in_distribution(const GraphDataset& dataset, double train_fraction,
                                std::uint64_t seed) {
  const int n = static_cast<int>(dataset.size());
  if (n < 2) throw DataError("split: dataset " + dataset.name + " has fewer than 2 graphs");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("split: train_fraction must lie in (0, 1)");

  auto n_train = static_cast<int>(std::llround(train_fraction * n));
  n_train = std::clamp(n_train, 1, n - 1);

  Rng rng(Rng::derive(seed, "split"));
  std::vector<int> order = rng.permutation(n);

  SplitSpec split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test_id.assign(order.begin() + n_train, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test_id.begin(), split.test_id.end());
  return split;
}

LabeledTestSet assemble_test_set(const std::vector<Graph>& id_test, const GraphDataset& ood,
                                 std::uint64_t seed) {
  if (id_test.empty()) throw DataError("assemble_test_set: empty ID test set");
  const int want = static_cast<int>(id_test.size());
  if (static_cast<int>(ood.size()) < want)
    throw DataError("assemble_test_set: OOD pool has " + std::to_string(ood.size()) +
                    " graphs, need " + std::to_string(want));
  const int id_dim = id_test.front().feature_dim();
  if (ood.feature_dim != id_dim)
    throw DataError("assemble_test_set: feature_dim mismatch (ID " + std::to_string(id_dim) +
                    ", OOD " + std::to_string(ood.feature_dim) + ")");

  Rng rng(Rng::derive(seed, "testset"));
  const std::vector<int> picks =
      rng.sample_without_replacement(static_cast<int>(ood.size()), want);

  LabeledTestSet test;
  test.graphs.reserve(id_test.size() * 2);
  for (const Graph& g : id_test) {
    test.graphs.push_back(g);
    test.labels.push_back(0);
  }
  for (const int idx : picks) {
    test.graphs.push_back(ood.graphs[static_cast<std::size_t>(idx)]);
    test.labels.push_back(1);
  }
  return test;
}

}  // namespace hgoe
