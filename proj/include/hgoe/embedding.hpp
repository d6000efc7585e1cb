#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hgoe/graph.hpp"

namespace hgoe {

struct EmbeddingConfig {
  int d_s = 16;           // diffusion steps
  int wl_iterations = 3;  // label refinement rounds
  int wl_dim = 64;        // hashed histogram buckets
  int feature_dim = -1;   // node feature width the embedding was bound to

  int dim() const { return wl_dim + 2 * d_s + 3; }
};

// Deterministic structural graph embedding: hashed Weisfeiler-Lehman label
// histogram (L1-normalized), mean/max pooling of the diffusion return
// probabilities, and [log(1+n), log(1+m), mean degree]. Exactly invariant
// under node permutation.
Eigen::VectorXd graph_summary_embedding(const Graph& g, const EmbeddingConfig& config);

// One embedding per graph, rows in dataset order.
Eigen::MatrixXd embed_graphs(const std::vector<Graph>& graphs, const EmbeddingConfig& config,
                             int jobs = 1);
Eigen::MatrixXd embed_graphs(const std::vector<const Graph*>& graphs,
                             const EmbeddingConfig& config, int jobs = 1);

std::vector<std::string> embedding_column_names(const EmbeddingConfig& config);

void write_embeddings_csv(const std::string& path, const Eigen::MatrixXd& embeddings,
                          const std::vector<int>& graph_ids, const EmbeddingConfig& config,
                          const std::string& config_digest = "");

}  // namespace hgoe
