#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "hgoe/graph.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {

// Step-function graphon: symmetric matrix of edge probabilities.
struct Graphon {
  Eigen::MatrixXd matrix;  // resolution x resolution, entries in [0, 1]
  int resolution = 0;

  void validate() const;
};

// How each graph's adjacency is mapped onto the common resolution before
// averaging. `order_preserving` keeps the stored node order (zero-padding or
// truncating at the tail); `degree_sort` reorders nodes by descending degree
// first. Degree sorting injects a rank gradient into homogeneous graphs and
// scrambles symmetric block structure, which ruins recovery of constant and
// balanced-block generators, so order_preserving is the default.
enum class GraphonAlignment { order_preserving, degree_sort };

// Averages size-aligned adjacency matrices, zeroes singular values below
// svt_coefficient * sqrt(D), clips to [0, 1] and symmetrizes. When
// svt_coefficient is not given it defaults to 2.02 * sqrt(mean density of the
// averaged matrix).
Graphon estimate_graphon_usvt(const std::vector<const Graph*>& graphs, int resolution,
                              std::optional<double> svt_coefficient = std::nullopt,
                              GraphonAlignment alignment = GraphonAlignment::order_preserving);
Graphon estimate_graphon_usvt(const std::vector<Graph>& graphs, int resolution,
                              std::optional<double> svt_coefficient = std::nullopt,
                              GraphonAlignment alignment = GraphonAlignment::order_preserving);

// Common resolution for one dataset: the given percentile of the training
// node counts, capped, and at least 2.
int graphon_resolution(std::vector<int> node_counts, int cap = 200, double percentile = 0.9);

// M = lambda * a + (1 - lambda) * b, entrywise.
Graphon mixup_graphons(const Graphon& a, const Graphon& b, double lambda);

// Uniform integer in [2, n_max], deterministic given seed.
int random_size(int n_max, std::uint64_t seed);

// Principal submatrix at r sorted latent positions drawn uniformly on [0, 1];
// position u maps to row/column ceil(u * D), clamped to [1, D].
Eigen::MatrixXd downsample_graphon(const Graphon& graphon, int r, Rng& rng);
// Deterministic variant used by tests and callers that manage their own draws.
Eigen::MatrixXd downsample_graphon_at(const Graphon& graphon, std::vector<double> latents);

struct SampledStructure {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
};

// Independent Bernoulli draw per upper-triangular entry; symmetric result
// with a zero diagonal.
SampledStructure bernoulli_sample(const Eigen::MatrixXd& probabilities, std::uint64_t seed);
SampledStructure bernoulli_sample(const Eigen::MatrixXd& probabilities, Rng& rng);

}  // namespace hgoe
