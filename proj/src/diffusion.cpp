#include "hgoe/diffusion.hpp"

#include <algorithm>

#include "hgoe/error.hpp"

namespace hgoe {

StructuralFeatures diffusion_node_features(int node_count,
                                           const std::vector<std::pair<int, int>>& edges,
                                           int steps) {
  if (node_count < 1) throw DataError("diffusion: node_count < 1");
  if (steps < 1) throw DataError("diffusion: steps < 1");

  const auto adj = adjacency_list_of(node_count, edges);
  std::vector<double> inv_deg(static_cast<std::size_t>(node_count), 0.0);
  for (int v = 0; v < node_count; ++v)
    if (!adj[static_cast<std::size_t>(v)].empty())
      inv_deg[static_cast<std::size_t>(v)] =
          1.0 / static_cast<double>(adj[static_cast<std::size_t>(v)].size());

  StructuralFeatures out;
  out.steps = steps;
  out.matrix = Eigen::MatrixXd::Zero(node_count, steps);

  // power = T^k, built as power <- T * power. T(a, c) = inv_deg[c] for c ~ a.
  Eigen::MatrixXd power = Eigen::MatrixXd::Zero(node_count, node_count);
  for (int a = 0; a < node_count; ++a)
    for (const int c : adj[static_cast<std::size_t>(a)])
      power(a, c) = inv_deg[static_cast<std::size_t>(c)];
  out.matrix.col(0) = power.diagonal();

  std::vector<double> terms;
  Eigen::MatrixXd next(node_count, node_count);
  for (int k = 1; k < steps; ++k) {
    for (int a = 0; a < node_count; ++a) {
      const auto& nbrs = adj[static_cast<std::size_t>(a)];
      for (int b = 0; b < node_count; ++b) {
        terms.clear();
        for (const int c : nbrs) terms.push_back(inv_deg[static_cast<std::size_t>(c)] * power(c, b));
        std::sort(terms.begin(), terms.end());
        double sum = 0.0;
        for (const double t : terms) sum += t;
        next(a, b) = sum;
      }
    }
    power.swap(next);
    out.matrix.col(k) = power.diagonal();
  }
  return out;
}

}  // namespace hgoe
