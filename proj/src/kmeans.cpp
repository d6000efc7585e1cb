#include "hgoe/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgoe/error.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {
namespace {

double sq_dist(const Eigen::MatrixXd& points, int i, const Eigen::MatrixXd& centroids, int c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

// Ties go to the lowest centroid index.
int nearest_centroid(const Eigen::MatrixXd& points, int i, const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d = sq_dist(points, i, centroids, 0);
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = sq_dist(points, i, centroids, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

std::vector<std::vector<int>> SubgroupAssignment::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  return out;
}

SubgroupAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                          int max_iter, double rel_tol) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw DataError("kmeans: k must be >= 1");
  if (n < k)
    throw DataError("kmeans: " + std::to_string(n) + " points for k = " + std::to_string(k));

  Rng rng(Rng::derive(seed, "kmeans"));
  Eigen::MatrixXd centroids(k, points.cols());

  // k-means++ seeding.
  centroids.row(0) = points.row(rng.uniform_int(0, n - 1));
  Eigen::VectorXd min_d2 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) min_d2[i] = (points.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = min_d2.sum();
    int pick;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += min_d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.uniform_int(0, n - 1));
    }
    centroids.row(c) = points.row(pick);
    for (int i = 0; i < n; ++i)
      min_d2[i] = std::min(min_d2[i], (points.row(i) - centroids.row(c)).squaredNorm());
  }

  SubgroupAssignment result;
  result.k = k;
  result.labels.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> cluster_size(static_cast<std::size_t>(k), 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment.
    std::fill(cluster_size.begin(), cluster_size.end(), 0);
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(points, i, centroids);
      result.labels[static_cast<std::size_t>(i)] = c;
      ++cluster_size[static_cast<std::size_t>(c)];
    }

    // Repair: reseed each empty cluster to the point farthest from its
    // assigned centroid (skipping points that are alone in their cluster).
    for (int c = 0; c < k; ++c) {
      if (cluster_size[static_cast<std::size_t>(c)] > 0) continue;
      int worst = -1;
      double worst_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const int owner = result.labels[static_cast<std::size_t>(i)];
        if (cluster_size[static_cast<std::size_t>(owner)] <= 1) continue;
        const double d = sq_dist(points, i, centroids, owner);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      if (worst < 0) throw NumericError("kmeans: cannot repair empty cluster");
      --cluster_size[static_cast<std::size_t>(result.labels[static_cast<std::size_t>(worst)])];
      result.labels[static_cast<std::size_t>(worst)] = c;
      ++cluster_size[static_cast<std::size_t>(c)];
      centroids.row(c) = points.row(worst);
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i)
      inertia += sq_dist(points, i, centroids, result.labels[static_cast<std::size_t>(i)]);
    result.inertia_history.push_back(inertia);

    // Update step.
    centroids.setZero();
    for (int i = 0; i < n; ++i)
      centroids.row(result.labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      centroids.row(c) /= static_cast<double>(cluster_size[static_cast<std::size_t>(c)]);

    if (std::isfinite(prev_inertia) &&
        prev_inertia - inertia <= rel_tol * std::max(prev_inertia, 1e-12)) {
      prev_inertia = inertia;
      break;
    }
    prev_inertia = inertia;
  }

  // Final assignment against the converged centroids.
  std::fill(cluster_size.begin(), cluster_size.end(), 0);
  result.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    const int c = nearest_centroid(points, i, centroids);
    result.labels[static_cast<std::size_t>(i)] = c;
    ++cluster_size[static_cast<std::size_t>(c)];
    result.inertia += sq_dist(points, i, centroids, c);
  }
  for (int c = 0; c < k; ++c) {
    if (cluster_size[static_cast<std::size_t>(c)] > 0) continue;
    int worst = -1;
    double worst_d = -1.0;
    for (int i = 0; i < n; ++i) {
      const int owner = result.labels[static_cast<std::size_t>(i)];
      if (cluster_size[static_cast<std::size_t>(owner)] <= 1) continue;
      const double d = sq_dist(points, i, centroids, owner);
      if (d > worst_d) {
        worst_d = d;
        worst = i;
      }
    }
    if (worst < 0) throw NumericError("kmeans: cannot repair empty cluster");
    --cluster_size[static_cast<std::size_t>(result.labels[static_cast<std::size_t>(worst)])];
    result.labels[static_cast<std::size_t>(worst)] = c;
    ++cluster_size[static_cast<std::size_t>(c)];
    centroids.row(c) = points.row(worst);
    result.inertia -= worst_d;
  }
  result.centroids = centroids;
  return result;
}

}  // namespace hgoe
