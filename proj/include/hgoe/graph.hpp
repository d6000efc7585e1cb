#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hgoe {

// Undirected attributed graph. Edges are stored canonically (a < b, sorted,
// deduplicated), so the implied adjacency matrix is symmetric 0/1 with a zero
// diagonal by construction.
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  Eigen::MatrixXd features;  // node_count x feature_dim
  std::string source_dataset;
  int graph_id = 0;

  int edge_count() const { return static_cast<int>(edges.size()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency_list() const;
  Eigen::MatrixXd adjacency_matrix() const;

  void validate() const;  // throws DataError on any broken invariant
};

// Collapses both orientations and duplicates, drops self-loops, sorts.
// Throws DataError if an endpoint is outside [0, node_count).
std::vector<std::pair<int, int>> canonical_edges(int node_count,
                                                 std::vector<std::pair<int, int>> edges);

std::vector<int> degrees_of(int node_count, const std::vector<std::pair<int, int>>& edges);
std::vector<std::vector<int>> adjacency_list_of(int node_count,
                                                const std::vector<std::pair<int, int>>& edges);

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  int feature_dim = 0;

  std::size_t size() const { return graphs.size(); }
  void validate() const;
  double mean_node_count() const;
};

struct SplitSpec {
  std::vector<int> train;
  std::vector<int> test_id;
  std::uint64_t seed = 0;
};

// Deterministic train/test split of the ID dataset. |train| = round(f * N),
// clamped so both sides stay nonempty.
SplitSpec split_in_distribution(const GraphDataset& dataset, double train_fraction,
                                std::uint64_t seed);

struct LabeledTestSet {
  std::vector<Graph> graphs;
  std::vector<int> labels;  // 0 = ID, 1 = OOD
};

// ID test graphs plus an equal number of OOD graphs sampled without
// replacement, deterministic given seed.
LabeledTestSet assemble_test_set(const std::vector<Graph>& id_test, const GraphDataset& ood,
                                 std::uint64_t seed);

}  // namespace hgoe
