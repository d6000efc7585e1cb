#include <doctest.h>

#include <cmath>
#include <set>

#include "hgoe/error.hpp"
#include "hgoe/graphon.hpp"
#include "test_util.hpp"

using namespace hgoe;

namespace {

Graphon constant_graphon(int d, double p) {
  Graphon g;
  g.resolution = d;
  g.matrix = Eigen::MatrixXd::Constant(d, d, p);
  return g;
}

Graphon two_block_graphon(int d, double p_in, double p_out) {
  Graphon g;
  g.resolution = d;
  g.matrix.resize(d, d);
  const int half = d / 2;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      g.matrix(i, j) = ((i < half) == (j < half)) ? p_in : p_out;
  return g;
}

}  // namespace

TEST_CASE("usvt on repeated complete graphs keeps everything near one") {
  const int d = 32;
  std::vector<Graph> graphs(50, test::complete_graph(d));
  const Graphon w = estimate_graphon_usvt(graphs, d);
  // Off-diagonal truth is 1; the retained dominant component is (d-1)/d * J.
  double min_entry = 1.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) min_entry = std::min(min_entry, w.matrix(i, j));
  CHECK(min_entry >= 0.95);
}

TEST_CASE("usvt output is exactly symmetric and clipped for arbitrary graphs") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Graph> graphs;
    const int count = 1 + static_cast<int>(rng.uniform_int(0, 6));
    for (int i = 0; i < count; ++i)
      graphs.push_back(
          test::random_graph(1 + static_cast<int>(rng.uniform_int(0, 24)), rng.uniform(), rng));
    const int d = 2 + static_cast<int>(rng.uniform_int(0, 14));
    const Graphon w = estimate_graphon_usvt(graphs, d);
    CHECK(w.matrix == w.matrix.transpose());
    CHECK(w.matrix.minCoeff() >= 0.0);
    CHECK(w.matrix.maxCoeff() <= 1.0);
    CHECK(w.resolution == d);
  }
}

TEST_CASE("usvt errors") {
  CHECK_THROWS_AS(estimate_graphon_usvt(std::vector<Graph>{}, 10), DataError);
  CHECK_THROWS_AS(estimate_graphon_usvt({test::complete_graph(3)}, 1), DataError);
}

TEST_CASE("graphon_resolution applies percentile and cap") {
  CHECK(graphon_resolution({10, 20, 30, 40, 50, 60, 70, 80, 90, 100}) == 90);
  CHECK(graphon_resolution({500, 600, 700}, 200) == 200);
  CHECK(graphon_resolution({1}, 200) == 2);  // floor at 2
}

TEST_CASE("mixup identities") {
  const Graphon a = two_block_graphon(10, 0.9, 0.3);
  const Graphon b = constant_graphon(10, 0.2);
  SUBCASE("lambda = 1 returns the first graphon exactly") {
    CHECK(mixup_graphons(a, b, 1.0).matrix == a.matrix);
  }
  SUBCASE("lambda = 0 returns the second graphon exactly") {
    CHECK(mixup_graphons(a, b, 0.0).matrix == b.matrix);
  }
  SUBCASE("midpoint of constants") {
    const Graphon lo = constant_graphon(6, 0.2);
    const Graphon hi = constant_graphon(6, 0.8);
    CHECK(mixup_graphons(lo, hi, 0.5).matrix == Eigen::MatrixXd::Constant(6, 6, 0.5));
  }
  SUBCASE("resolution mismatch") {
    CHECK_THROWS_AS(mixup_graphons(a, constant_graphon(9, 0.5), 0.5), DataError);
  }
  SUBCASE("lambda outside [0, 1]") { CHECK_THROWS_AS(mixup_graphons(a, b, 1.5), DataError); }
}

TEST_CASE("mixup linearity") {
  Rng rng(55);
  Graphon a = constant_graphon(8, 0.0);
  Graphon b = constant_graphon(8, 0.0);
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) {
      a.matrix(i, j) = a.matrix(j, i) = rng.uniform();
      b.matrix(i, j) = b.matrix(j, i) = rng.uniform();
    }
  // Exact complement identity at dyadic lambdas, tight tolerance elsewhere.
  for (const double lambda : {0.0, 0.5, 1.0}) {
    const Eigen::MatrixXd sum =
        mixup_graphons(a, b, lambda).matrix + mixup_graphons(a, b, 1.0 - lambda).matrix;
    CHECK(sum == a.matrix + b.matrix);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double lambda = rng.uniform();
    const Eigen::MatrixXd sum =
        mixup_graphons(a, b, lambda).matrix + mixup_graphons(a, b, 1.0 - lambda).matrix;
    CHECK((sum - (a.matrix + b.matrix)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("random_size") {
  SUBCASE("degenerate range always returns 2") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(random_size(2, seed) == 2);
  }
  SUBCASE("deterministic") { CHECK(random_size(100, 9) == random_size(100, 9)); }
  SUBCASE("all draws stay in range and each value appears within 3 sigma") {
    const int n_max = 10;
    const int draws = 10000;
    std::vector<int> counts(static_cast<std::size_t>(n_max + 1), 0);
    for (int i = 0; i < draws; ++i) {
      const int r = random_size(n_max, static_cast<std::uint64_t>(i));
      REQUIRE(r >= 2);
      REQUIRE(r <= n_max);
      ++counts[static_cast<std::size_t>(r)];
    }
    const double p = 1.0 / 9.0;
    const double sigma = std::sqrt(draws * p * (1.0 - p));
    for (int v = 2; v <= n_max; ++v)
      CHECK(std::abs(counts[static_cast<std::size_t>(v)] - draws * p) <= 3.0 * sigma);
  }
  SUBCASE("invalid maximum") { CHECK_THROWS_AS(random_size(1, 0), DataError); }
}

TEST_CASE("downsample_graphon") {
  SUBCASE("evenly spaced latents at r = D reproduce the graphon") {
    const Graphon g = two_block_graphon(12, 0.7, 0.1);
    std::vector<double> latents;
    for (int i = 0; i < 12; ++i) latents.push_back((i + 0.5) / 12.0);
    CHECK(downsample_graphon_at(g, latents) == g.matrix);
  }
  SUBCASE("constant graphon is invariant under any sampling") {
    const Graphon g = constant_graphon(20, 0.35);
    Rng rng(77);
    for (int r = 2; r <= 20; r += 6) {
      const Eigen::MatrixXd sub = downsample_graphon(g, r, rng);
      CHECK(sub == Eigen::MatrixXd::Constant(r, r, 0.35));
    }
  }
  SUBCASE("two-block lookup at chosen latents") {
    const Graphon g = two_block_graphon(10, 0.8, 0.2);
    const Eigen::MatrixXd sub = downsample_graphon_at(g, {0.1, 0.9});
    CHECK(sub(0, 0) == 0.8);
    CHECK(sub(1, 1) == 0.8);
    CHECK(sub(0, 1) == 0.2);
    CHECK(sub(1, 0) == 0.2);
  }
  SUBCASE("size out of range") {
    const Graphon g = constant_graphon(5, 0.5);
    Rng rng(1);
    CHECK_THROWS_AS(downsample_graphon(g, 1, rng), DataError);
    CHECK_THROWS_AS(downsample_graphon(g, 6, rng), DataError);
  }
}

TEST_CASE("bernoulli_sample") {
  SUBCASE("probability one gives the complete graph") {
    const SampledStructure s = bernoulli_sample(Eigen::MatrixXd::Ones(7, 7), 3);
    CHECK(s.node_count == 7);
    CHECK(s.edges.size() == 21);
  }
  SUBCASE("probability zero gives the empty graph") {
    const SampledStructure s = bernoulli_sample(Eigen::MatrixXd::Zero(7, 7), 3);
    CHECK(s.edges.empty());
  }
  SUBCASE("edge density concentrates around p") {
    const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(40, 40, 0.5);
    const double pairs = 40.0 * 39.0 / 2.0;
    double total = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t)
      total += static_cast<double>(bernoulli_sample(half, static_cast<std::uint64_t>(t)).edges.size()) / pairs;
    const double sigma = std::sqrt(0.25 / (pairs * trials));
    CHECK(std::abs(total / trials - 0.5) <= 3.0 * sigma);
  }
  SUBCASE("deterministic given seed") {
    const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(15, 15, 0.4);
    CHECK(bernoulli_sample(p, 12).edges == bernoulli_sample(p, 12).edges);
  }
}

TEST_CASE("estimate -> mixup -> downsample -> sample is bit-reproducible") {
  Rng data_rng(88);
  std::vector<Graph> group_a, group_b;
  for (int i = 0; i < 30; ++i) {
    group_a.push_back(test::random_graph(18, 0.6, data_rng));
    group_b.push_back(test::random_graph(18, 0.15, data_rng));
  }
  auto run_pipeline = [&](std::uint64_t seed) {
    const Graphon wa = estimate_graphon_usvt(group_a, 18);
    const Graphon wb = estimate_graphon_usvt(group_b, 18);
    const Graphon mixed = mixup_graphons(wa, wb, 0.4);
    Rng rng(seed);
    const int r = random_size(mixed.resolution, seed);
    const Eigen::MatrixXd sub = downsample_graphon(mixed, r, rng);
    return bernoulli_sample(sub, rng);
  };
  const SampledStructure s1 = run_pipeline(5);
  const SampledStructure s2 = run_pipeline(5);
  CHECK(s1.node_count == s2.node_count);
  CHECK(s1.edges == s2.edges);
}

TEST_CASE("expected edge count of bernoulli_sample matches the probability mass") {
  Rng rng(91);
  Eigen::MatrixXd p(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = i; j < 12; ++j) p(i, j) = p(j, i) = rng.uniform();
  double upper_mass = 0.0, upper_var = 0.0;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) {
      upper_mass += p(i, j);
      upper_var += p(i, j) * (1.0 - p(i, j));
    }
  const int trials = 2000;
  double total_edges = 0.0;
  for (int t = 0; t < trials; ++t)
    total_edges += static_cast<double>(bernoulli_sample(p, static_cast<std::uint64_t>(t)).edges.size());
  const double sigma = std::sqrt(upper_var / trials);
  CHECK(std::abs(total_edges / trials - upper_mass) <= 3.0 * sigma);
}
