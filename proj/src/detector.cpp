#include "hgoe/detector.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "hgoe/error.hpp"
#include "hgoe/rng.hpp"

namespace hgoe {

using nlohmann::json;

TauStrategy tau_strategy_from_string(const std::string& name) {
  if (name == "min") return TauStrategy::min;
  if (name == "mean") return TauStrategy::mean;
  if (name == "max") return TauStrategy::max;
  if (name == "none") return TauStrategy::none;
  throw DataError("unknown tau strategy '" + name + "'");
}

std::string to_string(TauStrategy strategy) {
  switch (strategy) {
    case TauStrategy::min: return "min";
    case TauStrategy::mean: return "mean";
    case TauStrategy::max: return "max";
    case TauStrategy::none: return "none";
  }
  return "min";
}

void LossParams::validate() const {
  if (!(l > 1.0)) throw DataError("loss: l must be > 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DataError("loss: gamma must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DataError("loss: beta must be >= 0");
}

Eigen::VectorXd ScoringModel::hidden(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd standardized = (x - input_mean).cwiseQuotient(input_scale);
  return (weights * standardized + bias).array().tanh();
}

double ScoringModel::raw_score(const Eigen::VectorXd& x) const {
  return (hidden(x) - center).squaredNorm();
}

ScoringModel init_model(int embedding_dim, int hidden_dim, std::uint64_t seed,
                        const Eigen::MatrixXd& id_embeddings,
                        const EmbeddingConfig& embedding_config) {
  if (embedding_dim < 1 || hidden_dim < 1) throw DataError("init_model: dimensions must be >= 1");
  if (id_embeddings.rows() < 1) throw DataError("init_model: no ID embeddings");
  if (id_embeddings.cols() != embedding_dim)
    throw DataError("init_model: embedding width " + std::to_string(id_embeddings.cols()) +
                    " != " + std::to_string(embedding_dim));

  ScoringModel model;
  model.embedding_config = embedding_config;
  const Eigen::RowVectorXd mean = id_embeddings.colwise().mean();
  const Eigen::RowVectorXd var =
      (id_embeddings.rowwise() - mean).array().square().colwise().mean();
  model.input_mean = mean.transpose();
  model.input_scale = var.array().sqrt().max(1e-8).matrix().transpose();
  model.weights.resize(hidden_dim, embedding_dim);
  model.bias.resize(hidden_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(embedding_dim));
  Rng rng(Rng::derive(seed, "init"));
  for (int i = 0; i < hidden_dim; ++i)
    for (int j = 0; j < embedding_dim; ++j) model.weights(i, j) = rng.uniform(-bound, bound);
  for (int i = 0; i < hidden_dim; ++i) model.bias[i] = rng.uniform(-bound, bound);

  model.center = Eigen::VectorXd::Zero(hidden_dim);
  for (Eigen::Index r = 0; r < id_embeddings.rows(); ++r)
    model.center += model.hidden(id_embeddings.row(r).transpose());
  model.center /= static_cast<double>(id_embeddings.rows());
  return model;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double tau_from_raw_scores(const std::vector<double>& raw_scores, TauStrategy strategy) {
  if (strategy == TauStrategy::none) return -std::numeric_limits<double>::infinity();
  if (raw_scores.empty()) throw DataError("tau: no ID scores");
  double acc = strategy == TauStrategy::mean ? 0.0 : log_sigmoid(raw_scores.front());
  for (std::size_t i = 0; i < raw_scores.size(); ++i) {
    const double v = log_sigmoid(raw_scores[i]);
    switch (strategy) {
      case TauStrategy::min: acc = std::min(acc, v); break;
      case TauStrategy::mean: acc += v; break;
      case TauStrategy::max: acc = std::max(acc, v); break;
      case TauStrategy::none: break;
    }
  }
  if (strategy == TauStrategy::mean) acc /= static_cast<double>(raw_scores.size());
  return acc;
}

double compute_tau(const ScoringModel& model, const Eigen::MatrixXd& id_embeddings,
                   TauStrategy strategy) {
  std::vector<double> raw(static_cast<std::size_t>(id_embeddings.rows()));
  for (Eigen::Index r = 0; r < id_embeddings.rows(); ++r)
    raw[static_cast<std::size_t>(r)] = model.raw_score(id_embeddings.row(r).transpose());
  return tau_from_raw_scores(raw, strategy);
}

double boundary_aware_loss(double s, double tau, double l, double gamma) {
  if (!(s > 0.0 && s < 1.0)) throw DataError("boundary_aware_loss: s must lie in (0, 1)");
  if (!(l > s)) throw DataError("boundary_aware_loss: l must exceed s");
  return -std::pow(l - s, gamma) * std::max(std::log(s), tau);
}

namespace {

// Boundary-aware loss evaluated from the raw score. log(sigmoid(f)) is
// computed in log space, so a score large enough to round sigmoid(f) up to
// 1.0 stays inside the loss domain.
double boundary_aware_loss_from_raw(double raw, double tau, double l, double gamma) {
  const double s = sigmoid(raw);
  return -std::pow(l - s, gamma) * std::max(log_sigmoid(raw), tau);
}

// dl/df of the boundary-aware loss at fixed tau, as a function of the raw
// score. The 1/s factor of the log branch is folded against ds/df = s(1-s)
// so saturated scores stay finite.
double boundary_aware_loss_df(double raw, double tau, double l, double gamma) {
  const double s = sigmoid(raw);
  const double log_s = log_sigmoid(raw);
  const double s_comp = 1.0 - s;
  if (log_s > tau) {
    const double dw = gamma == 0.0 ? 0.0 : gamma * std::pow(l - s, gamma - 1.0);
    return dw * log_s * s * s_comp - std::pow(l - s, gamma) * s_comp;
  }
  return gamma == 0.0 ? 0.0 : tau * gamma * std::pow(l - s, gamma - 1.0) * s * s_comp;
}

// d f / d z for one sample, where z = W x~ + b, h = tanh(z), f = ||h - c||^2.
Eigen::VectorXd score_dz(const ScoringModel& model, const Eigen::VectorXd& standardized,
                         double* f_out) {
  const Eigen::VectorXd h = (model.weights * standardized + model.bias).array().tanh();
  if (f_out != nullptr) *f_out = (h - model.center).squaredNorm();
  return 2.0 * (h - model.center).cwiseProduct(
                   (Eigen::VectorXd::Ones(h.size()) - h.cwiseProduct(h)));
}

}  // namespace

LossBreakdown total_loss(const ScoringModel& model, const Eigen::MatrixXd& id_batch,
                         const Eigen::MatrixXd& oe_batch, const LossParams& params, double tau) {
  params.validate();
  LossBreakdown out;
  for (Eigen::Index r = 0; r < id_batch.rows(); ++r)
    out.id_term += model.raw_score(id_batch.row(r).transpose());
  double oe_sum = 0.0;
  if (params.beta > 0.0) {
    for (Eigen::Index r = 0; r < oe_batch.rows(); ++r)
      oe_sum += boundary_aware_loss_from_raw(model.raw_score(oe_batch.row(r).transpose()), tau,
                                             params.l, params.gamma);
  }
  out.oe_term = params.beta * oe_sum;
  out.total = out.id_term + out.oe_term;
  return out;
}

ModelGrad gradient(const ScoringModel& model, const Eigen::MatrixXd& id_batch,
                   const Eigen::MatrixXd& oe_batch, const LossParams& params, double tau) {
  params.validate();
  ModelGrad grad;
  grad.weights = Eigen::MatrixXd::Zero(model.hidden_dim(), model.input_dim());
  grad.bias = Eigen::VectorXd::Zero(model.hidden_dim());

  for (Eigen::Index r = 0; r < id_batch.rows(); ++r) {
    const Eigen::VectorXd standardized =
        (id_batch.row(r).transpose() - model.input_mean).cwiseQuotient(model.input_scale);
    const Eigen::VectorXd dz = score_dz(model, standardized, nullptr);
    grad.weights.noalias() += dz * standardized.transpose();
    grad.bias += dz;
  }

  if (params.beta > 0.0 && oe_batch.rows() > 0) {
    Eigen::MatrixXd oe_weights = Eigen::MatrixXd::Zero(model.hidden_dim(), model.input_dim());
    Eigen::VectorXd oe_bias = Eigen::VectorXd::Zero(model.hidden_dim());
    for (Eigen::Index r = 0; r < oe_batch.rows(); ++r) {
      const Eigen::VectorXd standardized =
          (oe_batch.row(r).transpose() - model.input_mean).cwiseQuotient(model.input_scale);
      double f = 0.0;
      const Eigen::VectorXd df_dz = score_dz(model, standardized, &f);
      const double dl_df = boundary_aware_loss_df(f, tau, params.l, params.gamma);
      oe_weights.noalias() += dl_df * df_dz * standardized.transpose();
      oe_bias += dl_df * df_dz;
    }
    grad.weights += params.beta * oe_weights;
    grad.bias += params.beta * oe_bias;
  }
  return grad;
}

TrainState train(ScoringModel& model, const Eigen::MatrixXd& id_embeddings,
                 const Eigen::MatrixXd& oe_embeddings, const LossParams& params,
                 const TrainConfig& config) {
  params.validate();
  if (id_embeddings.rows() < 1) throw DataError("train: empty ID training set");
  if (config.batch_size < 1) throw DataError("train: batch_size must be >= 1");
  if (config.epochs < 0) throw DataError("train: epochs must be >= 0");

  const int n_id = static_cast<int>(id_embeddings.rows());
  const int n_oe = static_cast<int>(oe_embeddings.rows());
  const bool use_oe = params.beta > 0.0 && n_oe > 0;

  TrainState state;
  state.tau_current = -std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double tau = compute_tau(model, id_embeddings, params.tau_strategy);
    if (std::isnan(tau))
      throw NumericError("train: tau is NaN at epoch " + std::to_string(epoch) +
                         "; an ID score is non-finite");
    state.tau_current = tau;

    Rng id_rng(Rng::derive(Rng::derive(config.seed, "epoch-id"), static_cast<std::uint64_t>(epoch)));
    const std::vector<int> id_order = id_rng.permutation(n_id);
    std::vector<int> oe_order;
    if (use_oe) {
      Rng oe_rng(
          Rng::derive(Rng::derive(config.seed, "epoch-oe"), static_cast<std::uint64_t>(epoch)));
      oe_order = oe_rng.permutation(n_oe);
    }

    const int n_batches = (n_id + config.batch_size - 1) / config.batch_size;
    EpochStats stats;
    stats.tau = tau;
    for (int b = 0; b < n_batches; ++b) {
      const int id_lo = b * config.batch_size;
      const int id_hi = std::min(n_id, id_lo + config.batch_size);
      Eigen::MatrixXd id_batch(id_hi - id_lo, id_embeddings.cols());
      for (int i = id_lo; i < id_hi; ++i)
        id_batch.row(i - id_lo) = id_embeddings.row(id_order[static_cast<std::size_t>(i)]);

      Eigen::MatrixXd oe_batch(0, id_embeddings.cols());
      if (use_oe) {
        const int oe_lo = static_cast<int>(static_cast<std::int64_t>(b) * n_oe / n_batches);
        const int oe_hi = static_cast<int>(static_cast<std::int64_t>(b + 1) * n_oe / n_batches);
        oe_batch.resize(oe_hi - oe_lo, oe_embeddings.cols());
        for (int i = oe_lo; i < oe_hi; ++i)
          oe_batch.row(i - oe_lo) = oe_embeddings.row(oe_order[static_cast<std::size_t>(i)]);
      }

      const LossBreakdown batch_loss = total_loss(model, id_batch, oe_batch, params, tau);
      if (!std::isfinite(batch_loss.total))
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b) +
                           " (total = " + std::to_string(batch_loss.total) + ")");
      stats.loss.total += batch_loss.total;
      stats.loss.id_term += batch_loss.id_term;
      stats.loss.oe_term += batch_loss.oe_term;

      // Mean-normalized step: the objective is a sum, but stepping on the
      // per-sample average keeps the learning rate batch-size independent.
      const ModelGrad grad = gradient(model, id_batch, oe_batch, params, tau);
      const double step = config.learning_rate / static_cast<double>(id_batch.rows());
      model.weights -= step * grad.weights;
      model.bias -= step * grad.bias;
    }
    state.history.push_back(stats);
    state.epochs_run = epoch + 1;
  }
  return state;
}

std::vector<ScoreRecord> score_dataset(const ScoringModel& model,
                                       const std::vector<Graph>& graphs) {
  std::vector<ScoreRecord> records;
  records.reserve(graphs.size());
  for (const Graph& g : graphs) {
    if (model.embedding_config.feature_dim >= 0 &&
        g.feature_dim() != model.embedding_config.feature_dim)
      throw DataError("score_dataset: graph feature_dim " + std::to_string(g.feature_dim()) +
                      " does not match the checkpoint embedding_config feature_dim " +
                      std::to_string(model.embedding_config.feature_dim));
    const Eigen::VectorXd x = graph_summary_embedding(g, model.embedding_config);
    if (x.size() != model.input_dim())
      throw DataError("score_dataset: embedding dim " + std::to_string(x.size()) +
                      " does not match model input dim " + std::to_string(model.input_dim()));
    ScoreRecord rec;
    rec.graph_id = g.graph_id;
    rec.raw = model.raw_score(x);
    rec.normalized = sigmoid(rec.raw);
    records.push_back(rec);
  }
  return records;
}

std::vector<double> mahalanobis_score(const Eigen::MatrixXd& id_embeddings,
                                      const Eigen::MatrixXd& queries, double ridge) {
  const Eigen::Index n = id_embeddings.rows();
  if (n < 2) throw DataError("mahalanobis: need at least 2 ID embeddings");
  const Eigen::Index dim = id_embeddings.cols();
  const Eigen::VectorXd mu = id_embeddings.colwise().mean();
  const Eigen::MatrixXd centered = id_embeddings.rowwise() - mu.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  cov += ridge * Eigen::MatrixXd::Identity(dim, dim);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  if (!lu.isInvertible())
    throw NumericError("mahalanobis: regularized covariance is singular; raise ridge");

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index r = 0; r < queries.rows(); ++r) {
    const Eigen::VectorXd d = queries.row(r).transpose() - mu;
    scores.push_back(d.dot(lu.solve(d)));
  }
  return scores;
}

void save_checkpoint(const ScoringModel& model, const LossParams& params,
                     const std::string& config_digest, const std::string& path) {
  json doc;
  doc["config_digest"] = config_digest;
  doc["input_dim"] = model.input_dim();
  doc["hidden_dim"] = model.hidden_dim();
  doc["embedding_config"] = {{"d_s", model.embedding_config.d_s},
                             {"wl_iterations", model.embedding_config.wl_iterations},
                             {"wl_dim", model.embedding_config.wl_dim},
                             {"feature_dim", model.embedding_config.feature_dim}};
  doc["loss_params"] = {{"l", params.l},
                        {"gamma", params.gamma},
                        {"beta", params.beta},
                        {"tau_strategy", to_string(params.tau_strategy)}};
  json rows = json::array();
  for (int i = 0; i < model.hidden_dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < model.input_dim(); ++j) row.push_back(model.weights(i, j));
    rows.push_back(std::move(row));
  }
  doc["weights"] = std::move(rows);
  doc["bias"] = std::vector<double>(model.bias.data(), model.bias.data() + model.bias.size());
  doc["center"] =
      std::vector<double>(model.center.data(), model.center.data() + model.center.size());
  doc["input_mean"] = std::vector<double>(model.input_mean.data(),
                                          model.input_mean.data() + model.input_mean.size());
  doc["input_scale"] = std::vector<double>(model.input_scale.data(),
                                           model.input_scale.data() + model.input_scale.size());

  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(1) << "\n";
}

ScoringModel load_checkpoint(const std::string& path, LossParams* params_out,
                             std::string* config_digest_out) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }

  ScoringModel model;
  const int input_dim = doc.at("input_dim").get<int>();
  const int hidden_dim = doc.at("hidden_dim").get<int>();
  const json& ec = doc.at("embedding_config");
  model.embedding_config.d_s = ec.at("d_s").get<int>();
  model.embedding_config.wl_iterations = ec.at("wl_iterations").get<int>();
  model.embedding_config.wl_dim = ec.at("wl_dim").get<int>();
  model.embedding_config.feature_dim = ec.at("feature_dim").get<int>();

  model.weights.resize(hidden_dim, input_dim);
  const json& rows = doc.at("weights");
  if (static_cast<int>(rows.size()) != hidden_dim)
    throw DataError(path + ": weight rows != hidden_dim");
  for (int i = 0; i < hidden_dim; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != input_dim)
      throw DataError(path + ": weight row width != input_dim");
    for (int j = 0; j < input_dim; ++j)
      model.weights(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  const auto bias = doc.at("bias").get<std::vector<double>>();
  const auto center = doc.at("center").get<std::vector<double>>();
  if (static_cast<int>(bias.size()) != hidden_dim ||
      static_cast<int>(center.size()) != hidden_dim)
    throw DataError(path + ": bias/center width != hidden_dim");
  model.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), hidden_dim);
  model.center = Eigen::Map<const Eigen::VectorXd>(center.data(), hidden_dim);
  const auto in_mean = doc.at("input_mean").get<std::vector<double>>();
  const auto in_scale = doc.at("input_scale").get<std::vector<double>>();
  if (static_cast<int>(in_mean.size()) != input_dim ||
      static_cast<int>(in_scale.size()) != input_dim)
    throw DataError(path + ": input_mean/input_scale width != input_dim");
  model.input_mean = Eigen::Map<const Eigen::VectorXd>(in_mean.data(), input_dim);
  model.input_scale = Eigen::Map<const Eigen::VectorXd>(in_scale.data(), input_dim);

  if (params_out != nullptr) {
    const json& lp = doc.at("loss_params");
    params_out->l = lp.at("l").get<double>();
    params_out->gamma = lp.at("gamma").get<double>();
    params_out->beta = lp.at("beta").get<double>();
    params_out->tau_strategy = tau_strategy_from_string(lp.at("tau_strategy").get<std::string>());
  }
  if (config_digest_out != nullptr) *config_digest_out = doc.value("config_digest", "");
  return model;
}

void write_loss_history_csv(const TrainState& state, const std::string& path,
                            const std::string& config_digest) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << "\n";
  out << "epoch,total,id_term,oe_term,tau\n";
  char buf[48];
  for (std::size_t e = 0; e < state.history.size(); ++e) {
    const EpochStats& st = state.history[e];
    out << e;
    for (const double v : {st.loss.total, st.loss.id_term, st.loss.oe_term, st.tau}) {
      std::snprintf(buf, sizeof(buf), "%.10g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
}

}  // namespace hgoe
