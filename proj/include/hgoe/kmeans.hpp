#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hgoe {

struct SubgroupAssignment {
  std::vector<int> labels;   // per-point cluster index in [0, k)
  int k = 0;
  Eigen::MatrixXd centroids;  // k x dim
  double inertia = 0.0;
  std::vector<double> inertia_history;  // one entry per Lloyd iteration

  std::vector<std::vector<int>> members() const;
};

// Lloyd iterations with k-means++ seeding, deterministic given seed. Empty
// clusters are repaired by reseeding to the point farthest from its assigned
// centroid. Stops when the relative inertia improvement drops below rel_tol
// or after max_iter iterations.
SubgroupAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                          int max_iter = 100, double rel_tol = 1e-4);

}  // namespace hgoe
