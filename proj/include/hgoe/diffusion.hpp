#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hgoe/graph.hpp"

namespace hgoe {

// Per-node return probabilities of the random walk with transition matrix
// T = A D^{-1}: row i holds [T_ii, (T^2)_ii, ..., (T^steps)_ii].
struct StructuralFeatures {
  Eigen::MatrixXd matrix;  // node_count x steps
  int steps = 0;
};

// Zero-degree nodes keep an all-zero row (their T column/row is zero; the walk
// dies there). Matrix-product terms are summed in value order, which makes the
// result exactly invariant under node relabeling.
StructuralFeatures diffusion_node_features(int node_count,
                                           const std::vector<std::pair<int, int>>& edges,
                                           int steps);

inline StructuralFeatures diffusion_node_features(const Graph& g, int steps) {
  return diffusion_node_features(g.node_count, g.edges, steps);
}

}  // namespace hgoe
