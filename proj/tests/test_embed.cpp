#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hgoe/diffusion.hpp"
#include "hgoe/embedding.hpp"
#include "hgoe/error.hpp"
#include "hgoe/kmeans.hpp"
#include "test_util.hpp"

using namespace hgoe;

namespace {

// Dense matrix-power oracle: T = A D^{-1} with plain triple-loop products in
// natural index order. Shares no code with diffusion_node_features.
std::vector<std::vector<double>> diffusion_brute_force(const Graph& g, int steps) {
  const int n = g.node_count;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [u, v] : g.edges) a[u][v] = a[v][u] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) deg[j] += a[i][j];

  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (deg[j] > 0.0) t[i][j] = a[i][j] / deg[j];

  std::vector<std::vector<double>> power = t;
  std::vector<std::vector<double>> result(n, std::vector<double>(steps, 0.0));
  for (int k = 0; k < steps; ++k) {
    if (k > 0) {
      std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int m = 0; m < n; ++m) next[i][j] += t[i][m] * power[m][j];
      power = next;
    }
    for (int i = 0; i < n; ++i) result[i][k] = power[i][i];
  }
  return result;
}

}  // namespace

TEST_CASE("diffusion features on K2: rows alternate 0,1") {
  const StructuralFeatures f = diffusion_node_features(test::complete_graph(2), 4);
  for (int i = 0; i < 2; ++i) {
    CHECK(f.matrix(i, 0) == 0.0);
    CHECK(f.matrix(i, 1) == 1.0);
    CHECK(f.matrix(i, 2) == 0.0);
    CHECK(f.matrix(i, 3) == 1.0);
  }
}

TEST_CASE("diffusion features on K3 match the eigenvalue closed form") {
  const StructuralFeatures f = diffusion_node_features(test::complete_graph(3), 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(f.matrix(i, 0) == 0.0);
    CHECK(f.matrix(i, 1) == 0.5);
    CHECK(f.matrix(i, 2) == 0.25);
    CHECK(f.matrix(i, 3) == 0.375);
  }
}

TEST_CASE("isolated node gets an all-zero diffusion row") {
  Graph g;
  g.node_count = 3;
  g.edges = {{0, 1}};
  g.features = Eigen::MatrixXd::Ones(3, 1);
  const StructuralFeatures f = diffusion_node_features(g, 5);
  CHECK(f.matrix.row(2).isZero(0.0));
  CHECK(f.matrix(0, 1) == 1.0);  // the K2 component still behaves
}

TEST_CASE("diffusion equals the dense matrix-power oracle on random graphs") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 11));
    const Graph g = test::random_graph(n, rng.uniform(0.1, 0.9), rng);
    const StructuralFeatures f = diffusion_node_features(g, 8);
    const auto oracle = diffusion_brute_force(g, 8);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 8; ++k) CHECK(std::abs(f.matrix(i, k) - oracle[i][k]) <= 1e-9);
  }
}

TEST_CASE("diffusion entries stay in [0, 1]") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 19));
    const Graph g = test::random_graph(n, rng.uniform(0.0, 1.0), rng);
    const StructuralFeatures f = diffusion_node_features(g, 16);
    CHECK(f.matrix.minCoeff() >= 0.0);
    CHECK(f.matrix.maxCoeff() <= 1.0);
  }
}

TEST_CASE("summary embedding is exactly permutation invariant") {
  Rng rng(31);
  EmbeddingConfig config;
  config.d_s = 8;
  config.wl_iterations = 3;
  config.wl_dim = 32;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 13));
    const Graph g = test::random_graph(n, rng.uniform(0.1, 0.9), rng, 2);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    const Graph h = test::permute_graph(g, perm);
    const Eigen::VectorXd eg = graph_summary_embedding(g, config);
    const Eigen::VectorXd eh = graph_summary_embedding(h, config);
    CHECK(eg == eh);  // exact equality, not approximate
  }
}

TEST_CASE("triangle and 3-path embeddings differ") {
  EmbeddingConfig config;
  const Eigen::VectorXd tri = graph_summary_embedding(test::complete_graph(3), config);
  const Eigen::VectorXd path = graph_summary_embedding(test::path_graph(3), config);
  CHECK(tri != path);
  CHECK(tri.size() == config.dim());
}

TEST_CASE("edgeless graph: WL mass sits on one bucket, diffusion block is zero") {
  EmbeddingConfig config;
  Graph g;
  g.node_count = 6;
  g.features = Eigen::MatrixXd::Ones(6, 1);
  const Eigen::VectorXd e = graph_summary_embedding(g, config);

  int nonzero_buckets = 0;
  double mass = 0.0;
  for (int i = 0; i < config.wl_dim; ++i) {
    if (e[i] != 0.0) ++nonzero_buckets;
    mass += e[i];
  }
  CHECK(nonzero_buckets == 1);
  CHECK(mass == doctest::Approx(1.0));
  for (int i = config.wl_dim; i < config.wl_dim + 2 * config.d_s; ++i) CHECK(e[i] == 0.0);

  // A single isolated node has the same initial label, so the same bucket.
  Graph one;
  one.node_count = 1;
  one.features = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd e1 = graph_summary_embedding(one, config);
  for (int i = 0; i < config.wl_dim; ++i) CHECK((e[i] != 0.0) == (e1[i] != 0.0));
}

TEST_CASE("kmeans") {
  SUBCASE("two well-separated clouds are recovered exactly") {
    Rng rng(3);
    Eigen::MatrixXd points(40, 2);
    for (int i = 0; i < 20; ++i)
      points.row(i) << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
    for (int i = 20; i < 40; ++i)
      points.row(i) << 10.0 + rng.uniform(-0.5, 0.5), 10.0 + rng.uniform(-0.5, 0.5);
    const SubgroupAssignment a = kmeans(points, 2, 7);
    for (int i = 1; i < 20; ++i) CHECK(a.labels[static_cast<std::size_t>(i)] == a.labels[0]);
    for (int i = 21; i < 40; ++i) CHECK(a.labels[static_cast<std::size_t>(i)] == a.labels[20]);
    CHECK(a.labels[0] != a.labels[20]);
  }
  SUBCASE("k=1: centroid is the coordinate-wise mean") {
    Rng rng(4);
    Eigen::MatrixXd points(15, 3);
    for (int i = 0; i < 15; ++i)
      points.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
    const SubgroupAssignment a = kmeans(points, 1, 0);
    CHECK(a.centroids.row(0).isApprox(points.colwise().mean(), 1e-12));
    for (const int label : a.labels) CHECK(label == 0);
  }
  SUBCASE("k = number of points: singleton clusters, zero inertia") {
    Eigen::MatrixXd points(5, 2);
    points << 0, 0, 1, 0, 2, 0, 3, 0, 4, 0;
    const SubgroupAssignment a = kmeans(points, 5, 9);
    std::set<int> used(a.labels.begin(), a.labels.end());
    CHECK(used.size() == 5);
    CHECK(a.inertia == 0.0);
  }
  SUBCASE("fewer points than clusters") {
    Eigen::MatrixXd points(2, 2);
    points << 0, 0, 1, 1;
    CHECK_THROWS_AS(kmeans(points, 3, 0), DataError);
  }
  SUBCASE("inertia history is non-increasing") {
    Rng rng(11);
    Eigen::MatrixXd points(120, 4);
    for (int i = 0; i < 120; ++i)
      for (int j = 0; j < 4; ++j) points(i, j) = rng.uniform();
    const SubgroupAssignment a = kmeans(points, 5, 13);
    for (std::size_t i = 1; i < a.inertia_history.size(); ++i)
      CHECK(a.inertia_history[i] <= a.inertia_history[i - 1]);
    CHECK(a.inertia <= a.inertia_history.back());
  }
  SUBCASE("every cluster index appears") {
    Rng rng(12);
    Eigen::MatrixXd points(30, 2);
    for (int i = 0; i < 30; ++i) points.row(i) << rng.uniform(), rng.uniform();
    const SubgroupAssignment a = kmeans(points, 7, 1);
    std::set<int> used(a.labels.begin(), a.labels.end());
    CHECK(used.size() == 7);
  }
  SUBCASE("deterministic given seed") {
    Rng rng(13);
    Eigen::MatrixXd points(50, 3);
    for (int i = 0; i < 50; ++i)
      points.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
    const SubgroupAssignment a = kmeans(points, 4, 21);
    const SubgroupAssignment b = kmeans(points, 4, 21);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
  }
}
