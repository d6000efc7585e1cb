#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgoe/embedding.hpp"
#include "hgoe/graph.hpp"

namespace hgoe {

enum class TauStrategy { min, mean, max, none };

TauStrategy tau_strategy_from_string(const std::string& name);
std::string to_string(TauStrategy strategy);

struct LossParams {
  double l = 2.0;      // weight offset; must exceed 1 so l - s stays positive
  double gamma = 2.0;  // boundary focus exponent
  double beta = 1.0;   // outlier-exposure weight
  TauStrategy tau_strategy = TauStrategy::min;

  void validate() const;
};

// One-class scoring head: h = tanh(W x~ + b), f(x) = ||h - center||^2, where
// x~ is the input standardized by the ID training statistics fixed at
// initialization. The center (mean hidden representation of the ID training
// embeddings) is fixed too; only W and b train. Standardization keeps the
// log-scale summary coordinates from drowning the [0,1]-scale blocks.
struct ScoringModel {
  Eigen::MatrixXd weights;     // hidden_dim x input_dim
  Eigen::VectorXd bias;        // hidden_dim
  Eigen::VectorXd center;      // hidden_dim
  Eigen::VectorXd input_mean;  // input_dim, fixed at init
  Eigen::VectorXd input_scale; // input_dim, fixed at init
  EmbeddingConfig embedding_config;

  int input_dim() const { return static_cast<int>(weights.cols()); }
  int hidden_dim() const { return static_cast<int>(weights.rows()); }

  Eigen::VectorXd hidden(const Eigen::VectorXd& x) const;
  double raw_score(const Eigen::VectorXd& x) const;  // >= 0
};

ScoringModel init_model(int embedding_dim, int hidden_dim, std::uint64_t seed,
                        const Eigen::MatrixXd& id_embeddings,
                        const EmbeddingConfig& embedding_config = {});

double sigmoid(double z);
double log_sigmoid(double z);

// Threshold in log space: strategy over the ID set of log(sigmoid(f(G))).
// Strategy `none` yields -infinity, so the loss always takes the log branch.
double tau_from_raw_scores(const std::vector<double>& raw_scores, TauStrategy strategy);
double compute_tau(const ScoringModel& model, const Eigen::MatrixXd& id_embeddings,
                   TauStrategy strategy);

// l_ba(s, tau) = -(l - s)^gamma * max(log s, tau); s must lie in (0, 1).
double boundary_aware_loss(double s, double tau, double l, double gamma);

struct LossBreakdown {
  double total = 0.0;
  double id_term = 0.0;  // sum of f(G) over the ID batch
  double oe_term = 0.0;  // beta * sum of l_ba over the OE batch
};

LossBreakdown total_loss(const ScoringModel& model, const Eigen::MatrixXd& id_batch,
                         const Eigen::MatrixXd& oe_batch, const LossParams& params, double tau);

struct ModelGrad {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

// Exact gradient of total_loss in the model parameters; tau is treated as a
// constant.
ModelGrad gradient(const ScoringModel& model, const Eigen::MatrixXd& id_batch,
                   const Eigen::MatrixXd& oe_batch, const LossParams& params, double tau);

struct EpochStats {
  LossBreakdown loss;
  double tau = 0.0;
};

struct TrainState {
  double tau_current = 0.0;
  int epochs_run = 0;
  std::vector<EpochStats> history;
};

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 1e-2;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

// Mini-batch SGD. Tau is recomputed over the full ID set at the start of each
// epoch; when beta is 0 or the OE set is empty, the outlier path (including
// its RNG stream) is skipped entirely, so such runs match bit for bit.
TrainState train(ScoringModel& model, const Eigen::MatrixXd& id_embeddings,
                 const Eigen::MatrixXd& oe_embeddings, const LossParams& params,
                 const TrainConfig& config);

struct ScoreRecord {
  int graph_id = 0;
  double raw = 0.0;
  double normalized = 0.5;  // sigmoid(raw)
  std::optional<int> label;  // 0 = ID, 1 = OOD
};

std::vector<ScoreRecord> score_dataset(const ScoringModel& model,
                                       const std::vector<Graph>& graphs);

// Baseline scorer: (x - mu)^T (Sigma + ridge I)^{-1} (x - mu) with mu, Sigma
// the ID sample mean and covariance.
std::vector<double> mahalanobis_score(const Eigen::MatrixXd& id_embeddings,
                                      const Eigen::MatrixXd& queries, double ridge = 1e-6);

void save_checkpoint(const ScoringModel& model, const LossParams& params,
                     const std::string& config_digest, const std::string& path);
ScoringModel load_checkpoint(const std::string& path, LossParams* params_out = nullptr,
                             std::string* config_digest_out = nullptr);

void write_loss_history_csv(const TrainState& state, const std::string& path,
                            const std::string& config_digest = "");

}  // namespace hgoe
