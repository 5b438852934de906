#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "threadlstm/dataset.hpp"
#include "threadlstm/evaluation.hpp"
#include "threadlstm/model.hpp"
#include "threadlstm/rng.hpp"

namespace threadlstm {

struct TrainConfig {
  std::vector<std::size_t> hidden_dims{16, 32, 64};
  std::size_t max_epochs = 20;
  std::uint64_t seed = 1;
  double rho = 0.95;
  double epsilon = 1e-6;
  double init_scale = 0.08;
  std::size_t patience = 3;
  ModelKind kind = ModelKind::GraphBidirectional;
  bool use_text = true;
  std::size_t embed_dim = kDefaultEmbeddingDim;
  double clip_norm = 5.0;        // global gradient norm; <= 0 disables clipping
  std::size_t batch_size = 1;    // threads per update
  std::size_t workers = 1;       // parallel gradient / evaluation workers

  /// Throws ConfigError for non-positive sizes, rho outside (0,1), epsilon <= 0.
  void validate() const;
};

/// Mean cross-entropy over retained non-root comments; pruned comments do
/// not contribute. 0 when nothing is scored.
double thread_loss(const Model& model, const ThreadExample& example);

/// The same quantity from emitted predictions, -mean log p(label).
double thread_loss(std::span<const NodePrediction> predictions, std::span<const std::size_t> labels);

/// Exact reverse-mode gradient of thread_loss, added into grad (a Model of
/// the same kind and dims). Returns the loss. Throws NumericError naming the
/// first parameter with a non-finite gradient.
double accumulate_gradients(const Model& model, const ThreadExample& example, Model& grad);

/// Fresh gradient for one thread.
Model gradients(const Model& model, const ThreadExample& example, double* loss = nullptr);

/// Scales grad in place so its global L2 norm is at most max_norm; returns
/// the norm before scaling.
double clip_gradients(Model& grad, double max_norm);

/// Per-parameter running averages of squared gradients and squared updates.
class AdadeltaState {
public:
  AdadeltaState(const Model& like, double rho, double epsilon);

  /// E[g^2] <- rho E[g^2] + (1-rho) g^2
  /// dx     <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
  /// E[dx^2] <- rho E[dx^2] + (1-rho) dx^2,   x <- x + dx
  /// Throws DimensionError when grads does not match the model layout.
  void step(Model& params, const Model& grads);

  const std::vector<Eigen::ArrayXd>& mean_square_gradient() const noexcept { return mean_sq_grad_; }
  const std::vector<Eigen::ArrayXd>& mean_square_update() const noexcept { return mean_sq_delta_; }

private:
  double rho_;
  double epsilon_;
  std::vector<Eigen::ArrayXd> mean_sq_grad_;
  std::vector<Eigen::ArrayXd> mean_sq_delta_;
};

/// Scored comments (model argmax, or level 0 when pruned) for a split.
/// Threads are processed by `workers` threads; output order is fixed.
std::vector<ScoredComment> score_comments(const Model& model, std::span<const ThreadExample> examples,
                                          std::size_t workers = 1);

/// Raw distributions aligned with score_comments, used for interpolation.
std::vector<Distribution> predict_distributions(const Model& model, std::span<const ThreadExample> examples,
                                                std::size_t workers = 1);

struct EpochLog {
  std::size_t hidden_dim = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_macro_f1 = 0.0;
  double dev_weighted_f1 = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  double best_dev_weighted_f1 = -1.0;
  std::size_t best_hidden_dim = 0;
  std::size_t best_epoch = 0;

  /// epoch,train_loss,dev_macro_f1,dev_weighted_f1,seconds (+ hidden_dim).
  std::string log_csv() const;
};

/// Trains one model per entry of hidden_dims and keeps the best by dev
/// weighted F1. Threads are visited in a seeded shuffle each epoch; the best
/// epoch's parameters are returned; training stops once `patience` epochs
/// pass without dev improvement. vocab_size sizes the embedding table and
/// `pretrained`, when given, replaces its random initialization.
TrainResult train(std::span<const ThreadExample> train_set, std::span<const ThreadExample> dev_set,
                  const TrainConfig& config, std::size_t vocab_size, const EmbeddingTable* pretrained = nullptr,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

struct GradcheckConfig {
  std::size_t trials = 50;
  std::uint64_t seed = 7;
  double step = 1e-4;
  double tolerance = 1e-5;
  double param_scale = 0.5;
  /// Test hook: applied to the analytic gradient before comparison.
  std::function<void(Model&)> corrupt;
};

struct GradcheckGroup {
  std::string name;
  double max_relative_error = 0.0;
  double max_abs_gradient = 0.0;
  std::size_t checked = 0;
};

struct GradcheckReport {
  std::vector<GradcheckGroup> groups;
  double max_relative_error = 0.0;
  std::size_t trials = 0;
  std::size_t coordinates = 0;
  double tolerance = 0.0;
  double seconds = 0.0;

  bool passed() const { return max_relative_error < tolerance; }
  const GradcheckGroup* group(const std::string& name) const;
  std::string to_text() const;
};

/// Finite-difference check of accumulate_gradients on random threads (3 to
/// 12 nodes), random pruning masks, hidden sizes {2, 4, 8}, every model
/// kind, with and without text. Error is |a-b| / max(1, |a|, |b|).
GradcheckReport gradcheck(const GradcheckConfig& config = {});

/// Random thread used by gradcheck: random shape, features, tokens, labels
/// and pruning mask. Exposed for tests.
ThreadExample random_example(Rng& rng, std::size_t nodes, std::size_t vocab_size, double prune_probability);

} // namespace threadlstm
