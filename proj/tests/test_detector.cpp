#include <doctest.h>

#include <cmath>
#include <limits>

#include "hgoe/detector.hpp"
#include "hgoe/error.hpp"
#include "test_util.hpp"

using namespace hgoe;

namespace {

Eigen::MatrixXd random_rows(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// Piecewise form of the boundary-aware loss, written independently.
double loss_piecewise(double s, double tau, double l, double gamma) {
  if (std::log(s) > tau) return -std::pow(l - s, gamma) * std::log(s);
  return -tau * std::pow(l - s, gamma);
}

}  // namespace

TEST_CASE("init_model") {
  Rng rng(1);
  const Eigen::MatrixXd ids = random_rows(12, 6, rng);
  const ScoringModel model = init_model(6, 4, 99, ids);

  SUBCASE("scores are non-negative") {
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd x = random_rows(1, 6, rng).row(0).transpose();
      CHECK(model.raw_score(x) >= 0.0);
    }
  }
  SUBCASE("a hidden representation at the center scores zero and normalizes to 0.5") {
    // With a single ID embedding the center is exactly its hidden image.
    const Eigen::MatrixXd one = ids.topRows(1);
    const ScoringModel m1 = init_model(6, 4, 7, one);
    const double f = m1.raw_score(one.row(0).transpose());
    CHECK(f == 0.0);
    CHECK(sigmoid(f) == 0.5);
  }
  SUBCASE("deterministic given seed and data") {
    const ScoringModel again = init_model(6, 4, 99, ids);
    CHECK(again.weights == model.weights);
    CHECK(again.bias == model.bias);
    CHECK(again.center == model.center);
  }
  SUBCASE("weights respect the fan-in bound") {
    const double bound = 1.0 / std::sqrt(6.0);
    CHECK(model.weights.cwiseAbs().maxCoeff() <= bound);
    CHECK(model.bias.cwiseAbs().maxCoeff() <= bound);
  }
  SUBCASE("empty embedding list") {
    CHECK_THROWS_AS(init_model(6, 4, 0, Eigen::MatrixXd(0, 6)), DataError);
  }
}

TEST_CASE("tau_from_raw_scores") {
  SUBCASE("worked example: raw {0, 1, -1} under min") {
    const double tau = tau_from_raw_scores({0.0, 1.0, -1.0}, TauStrategy::min);
    CHECK(tau == doctest::Approx(-1.3133).epsilon(1e-4));
  }
  SUBCASE("singleton: min = mean = max") {
    const std::vector<double> one{0.37};
    const double lo = tau_from_raw_scores(one, TauStrategy::min);
    const double mid = tau_from_raw_scores(one, TauStrategy::mean);
    const double hi = tau_from_raw_scores(one, TauStrategy::max);
    CHECK(lo == mid);
    CHECK(mid == hi);
  }
  SUBCASE("none yields -infinity so the log branch always wins") {
    const double tau = tau_from_raw_scores({0.0, 5.0}, TauStrategy::none);
    CHECK(std::isinf(tau));
    CHECK(tau < 0.0);
    for (const double s : {1e-9, 0.3, 0.999})
      CHECK(boundary_aware_loss(s, tau, 2.0, 2.0) ==
            -std::pow(2.0 - s, 2.0) * std::log(s));
  }
  SUBCASE("with min, every ID sample sits at or above tau") {
    Rng rng(3);
    std::vector<double> raw;
    for (int i = 0; i < 40; ++i) raw.push_back(rng.uniform(0.0, 5.0));
    const double tau = tau_from_raw_scores(raw, TauStrategy::min);
    for (const double r : raw) CHECK(log_sigmoid(r) >= tau);
  }
}

TEST_CASE("boundary_aware_loss") {
  SUBCASE("worked example above the threshold") {
    const double loss = boundary_aware_loss(0.5, std::log(0.2), 2.0, 2.0);
    CHECK(loss == doctest::Approx(1.5595).epsilon(1e-4));
  }
  SUBCASE("worked example below the threshold") {
    const double loss = boundary_aware_loss(0.1, std::log(0.5), 2.0, 2.0);
    CHECK(loss == doctest::Approx(2.5022).epsilon(1e-4));
  }
  SUBCASE("gamma = 0 collapses the weight to 1") {
    for (const double l : {1.5, 2.0, 11.0})
      CHECK(boundary_aware_loss(0.3, -0.5, l, 0.0) ==
            -std::max(std::log(0.3), -0.5));
  }
  SUBCASE("matches the piecewise form on 10000 random tuples") {
    Rng rng(9);
    double max_dev = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double s = rng.uniform(1e-6, 1.0 - 1e-6);
      const double tau = -rng.uniform(0.0, 5.0);
      const double l = 1.0 + rng.uniform(1e-3, 3.0);
      const double gamma = rng.uniform(0.0, 3.0);
      max_dev = std::max(max_dev, std::abs(boundary_aware_loss(s, tau, l, gamma) -
                                           loss_piecewise(s, tau, l, gamma)));
    }
    CHECK(max_dev < 1e-12);
  }
  SUBCASE("continuous at the branch point") {
    const double tau = std::log(0.4);
    const double at = boundary_aware_loss(0.4, tau, 2.0, 2.0);
    for (const double eps : {1e-6, 1e-9, 1e-12}) {
      CHECK(std::abs(boundary_aware_loss(0.4 + eps, tau, 2.0, 2.0) - at) < 1e-5);
      CHECK(std::abs(boundary_aware_loss(0.4 - eps, tau, 2.0, 2.0) - at) < 1e-5);
    }
  }
  SUBCASE("gamma = 0, log s > tau: strictly decreasing in s") {
    const double tau = std::log(0.05);
    double prev = boundary_aware_loss(0.10, tau, 2.0, 0.0);
    for (double s = 0.15; s < 1.0; s += 0.05) {
      const double cur = boundary_aware_loss(s, tau, 2.0, 0.0);
      CHECK(cur < prev);
      prev = cur;
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(boundary_aware_loss(0.0, -1.0, 2.0, 2.0), DataError);
    CHECK_THROWS_AS(boundary_aware_loss(1.0, -1.0, 2.0, 2.0), DataError);
  }
}

TEST_CASE("total_loss") {
  Rng rng(21);
  const Eigen::MatrixXd ids = random_rows(8, 5, rng);
  const ScoringModel model = init_model(5, 3, 4, ids);
  const Eigen::MatrixXd oe = random_rows(6, 5, rng);
  LossParams params;

  SUBCASE("beta = 0 reduces to the ID sum") {
    params.beta = 0.0;
    const LossBreakdown loss = total_loss(model, ids, oe, params, -1.0);
    double id_sum = 0.0;
    for (int i = 0; i < ids.rows(); ++i) id_sum += model.raw_score(ids.row(i).transpose());
    CHECK(loss.total == id_sum);
    CHECK(loss.oe_term == 0.0);
  }
  SUBCASE("empty OE batch reduces to the ID sum") {
    const LossBreakdown loss =
        total_loss(model, ids, Eigen::MatrixXd(0, 5), params, -1.0);
    CHECK(loss.total == loss.id_term);
    CHECK(loss.oe_term == 0.0);
  }
  SUBCASE("worked scalar example: 1.0 + 2.0 + 1.5595") {
    // Raw ID scores 1 and 2, one OE sample with s = 0.5, tau = log 0.2,
    // l = 2, gamma = 2; the OE term was derived by hand.
    const double oe_loss = boundary_aware_loss(0.5, std::log(0.2), 2.0, 2.0);
    CHECK(1.0 + 2.0 + oe_loss == doctest::Approx(4.5595).epsilon(1e-4));
  }
}

TEST_CASE("gradient") {
  Rng rng(33);
  LossParams params;

  SUBCASE("matches central finite differences") {
    for (int trial = 0; trial < 5; ++trial) {
      const int in_dim = 4 + trial;
      const Eigen::MatrixXd ids = random_rows(6, in_dim, rng);
      const Eigen::MatrixXd oe = random_rows(5, in_dim, rng);
      ScoringModel model = init_model(in_dim, 3, 100 + trial, ids);
      const double tau = compute_tau(model, ids, TauStrategy::min);
      const ModelGrad grad = gradient(model, ids, oe, params, tau);

      const double h = 1e-5;
      auto loss_at = [&]() { return total_loss(model, ids, oe, params, tau).total; };
      for (int i = 0; i < model.hidden_dim(); ++i)
        for (int j = 0; j < model.input_dim(); ++j) {
          const double keep = model.weights(i, j);
          model.weights(i, j) = keep + h;
          const double up = loss_at();
          model.weights(i, j) = keep - h;
          const double down = loss_at();
          model.weights(i, j) = keep;
          const double fd = (up - down) / (2.0 * h);
          const double rel = std::abs(grad.weights(i, j) - fd) /
                             std::max({std::abs(fd), std::abs(grad.weights(i, j)), 1e-8});
          CHECK(rel < 1e-4);
        }
    }
  }
  SUBCASE("vanishes at the stationary point of the distance term") {
    // Zero weights and bias put every hidden output at tanh(0) = 0, and the
    // center (mean of those) is 0 too, so the ID gradient is exactly zero.
    const Eigen::MatrixXd ids = random_rows(7, 4, rng);
    ScoringModel model = init_model(4, 3, 0, ids);
    model.weights.setZero();
    model.bias.setZero();
    model.center = Eigen::VectorXd::Zero(3);
    LossParams off;
    off.beta = 0.0;
    const ModelGrad grad = gradient(model, ids, Eigen::MatrixXd(0, 4), off, -1.0);
    CHECK(grad.weights.isZero(0.0));
    CHECK(grad.bias.isZero(0.0));
  }
  SUBCASE("OE contribution is exactly linear in beta") {
    const Eigen::MatrixXd ids = random_rows(6, 4, rng);
    const Eigen::MatrixXd oe = random_rows(4, 4, rng);
    const ScoringModel model = init_model(4, 3, 5, ids);
    const double tau = compute_tau(model, ids, TauStrategy::min);
    LossParams beta0 = params, beta1 = params, beta2 = params;
    beta0.beta = 0.0;
    beta1.beta = 1.0;
    beta2.beta = 2.0;
    const Eigen::MatrixXd g0 = gradient(model, ids, oe, beta0, tau).weights;
    const Eigen::MatrixXd g1 = gradient(model, ids, oe, beta1, tau).weights;
    const Eigen::MatrixXd g2 = gradient(model, ids, oe, beta2, tau).weights;
    // One rounding when the scaled OE part joins the ID part, hence the
    // near-machine tolerance instead of bitwise equality.
    const double scale = g1.cwiseAbs().maxCoeff() + 1.0;
    CHECK(((g2 - g0) - 2.0 * (g1 - g0)).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("train") {
  Rng rng(44);
  // ID points cluster near the origin, OE points sit displaced.
  const Eigen::MatrixXd ids = random_rows(40, 6, rng, -0.2, 0.2);
  const Eigen::MatrixXd oe = random_rows(40, 6, rng, 1.0, 2.0);
  LossParams params;
  TrainConfig config;
  config.epochs = 15;
  config.batch_size = 16;
  config.learning_rate = 1e-2;

  SUBCASE("lr = 0 leaves parameters untouched") {
    ScoringModel model = init_model(6, 4, 1, ids);
    const Eigen::MatrixXd w0 = model.weights;
    TrainConfig frozen = config;
    frozen.learning_rate = 0.0;
    train(model, ids, oe, params, frozen);
    CHECK(model.weights == w0);
  }
  SUBCASE("loss decreases on the toy problem across seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ScoringModel model = init_model(6, 4, seed, ids);
      TrainConfig c = config;
      c.seed = seed;
      const TrainState state = train(model, ids, oe, params, c);
      REQUIRE(state.history.size() == 15);
      CHECK(state.history.back().loss.total <= state.history.front().loss.total);
    }
  }
  SUBCASE("beta = 0 equals an empty OE run parameter for parameter") {
    ScoringModel a = init_model(6, 4, 2, ids);
    ScoringModel b = init_model(6, 4, 2, ids);
    LossParams beta0 = params;
    beta0.beta = 0.0;
    train(a, ids, oe, beta0, config);
    train(b, ids, Eigen::MatrixXd(0, 6), params, config);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
  }
  SUBCASE("training twice with one seed is bit-reproducible") {
    ScoringModel a = init_model(6, 4, 3, ids);
    ScoringModel b = init_model(6, 4, 3, ids);
    const TrainState sa = train(a, ids, oe, params, config);
    const TrainState sb = train(b, ids, oe, params, config);
    CHECK(a.weights == b.weights);
    CHECK(sa.history.back().loss.total == sb.history.back().loss.total);
  }
  SUBCASE("a non-finite loss aborts with a numeric error") {
    // The tanh head keeps losses bounded for finite inputs, so the abort path
    // triggers on poisoned data rather than on a large learning rate.
    Eigen::MatrixXd poisoned = ids;
    poisoned(0, 0) = std::numeric_limits<double>::quiet_NaN();
    ScoringModel model = init_model(6, 4, 4, ids);
    CHECK_THROWS_AS(train(model, poisoned, oe, params, config), NumericError);
  }
}

TEST_CASE("score_dataset") {
  Rng rng(55);
  EmbeddingConfig emb;
  emb.d_s = 4;
  emb.wl_iterations = 2;
  emb.wl_dim = 16;
  emb.feature_dim = 1;
  std::vector<Graph> graphs;
  for (int i = 0; i < 8; ++i) {
    Graph g = test::random_graph(6, 0.5, rng);
    g.graph_id = 10 + i;
    graphs.push_back(std::move(g));
  }
  const Eigen::MatrixXd ids = embed_graphs(graphs, emb);
  const ScoringModel model = init_model(emb.dim(), 4, 6, ids, emb);

  SUBCASE("records preserve order and apply the sigmoid") {
    const std::vector<ScoreRecord> records = score_dataset(model, graphs);
    REQUIRE(records.size() == graphs.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].graph_id == graphs[i].graph_id);
      CHECK(records[i].normalized == sigmoid(records[i].raw));
      CHECK(records[i].normalized > 0.0);
      CHECK(records[i].normalized < 1.0);
    }
  }
  SUBCASE("monotone: higher raw means higher normalized") {
    const std::vector<ScoreRecord> records = score_dataset(model, graphs);
    for (std::size_t i = 0; i < records.size(); ++i)
      for (std::size_t j = 0; j < records.size(); ++j)
        if (records[i].raw > records[j].raw)
          CHECK(records[i].normalized > records[j].normalized);
  }
  SUBCASE("feature-dim mismatch is a data error") {
    std::vector<Graph> wide{test::random_graph(5, 0.5, rng, 3)};
    CHECK_THROWS_AS(score_dataset(model, wide), DataError);
  }
}

TEST_CASE("mahalanobis_score") {
  SUBCASE("the mean scores zero") {
    Rng rng(66);
    const Eigen::MatrixXd ids = random_rows(30, 4, rng);
    const Eigen::VectorXd mu = ids.colwise().mean();
    Eigen::MatrixXd query(1, 4);
    query.row(0) = mu;
    const std::vector<double> scores = mahalanobis_score(ids, query, 1e-9);
    CHECK(std::abs(scores[0]) < 1e-18);
  }
  SUBCASE("identity sample covariance reduces to squared euclidean distance") {
    // +/- a e_k rows with a = sqrt((N-1)/2) give sample covariance exactly I.
    const int dim = 3;
    const int n = 2 * dim;
    const double a = std::sqrt((n - 1) / 2.0);
    Eigen::MatrixXd ids = Eigen::MatrixXd::Zero(n, dim);
    for (int k = 0; k < dim; ++k) {
      ids(2 * k, k) = a;
      ids(2 * k + 1, k) = -a;
    }
    Rng rng(67);
    const Eigen::MatrixXd queries = random_rows(10, dim, rng);
    const std::vector<double> scores = mahalanobis_score(ids, queries, 0.0);
    for (int i = 0; i < 10; ++i)
      CHECK(std::abs(scores[static_cast<std::size_t>(i)] - queries.row(i).squaredNorm()) < 1e-9);
  }
  SUBCASE("scores are non-negative") {
    Rng rng(68);
    const Eigen::MatrixXd ids = random_rows(25, 5, rng);
    const Eigen::MatrixXd queries = random_rows(40, 5, rng, -3.0, 3.0);
    for (const double s : mahalanobis_score(ids, queries)) CHECK(s >= 0.0);
  }
  SUBCASE("singular covariance with zero ridge is a numeric error") {
    Eigen::MatrixXd degenerate = Eigen::MatrixXd::Zero(5, 3);  // all identical rows
    CHECK_THROWS_AS(mahalanobis_score(degenerate, degenerate, 0.0), NumericError);
  }
}

TEST_CASE("checkpoint round trip") {
  Rng rng(77);
  EmbeddingConfig emb;
  emb.feature_dim = 2;
  const Eigen::MatrixXd ids = random_rows(10, emb.dim(), rng);
  const ScoringModel model = init_model(emb.dim(), 5, 8, ids, emb);
  LossParams params;
  params.gamma = 1.5;
  params.tau_strategy = TauStrategy::mean;

  test::TempDir dir;
  save_checkpoint(model, params, "digest123", dir.file("ckpt.json"));
  LossParams loaded_params;
  std::string digest;
  const ScoringModel loaded = load_checkpoint(dir.file("ckpt.json"), &loaded_params, &digest);
  CHECK(loaded.weights == model.weights);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.center == model.center);
  CHECK(loaded.embedding_config.feature_dim == 2);
  CHECK(loaded_params.gamma == 1.5);
  CHECK(loaded_params.tau_strategy == TauStrategy::mean);
  CHECK(digest == "digest123");
}
