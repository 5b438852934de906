#include "threadlstm/baseline_ffnn.hpp"

#include <string>

#include "threadlstm/error.hpp"
#include "threadlstm/evaluation.hpp"

namespace threadlstm {

FeedforwardParams FeedforwardParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  const auto dx = static_cast<Eigen::Index>(input_dim), dh = static_cast<Eigen::Index>(hidden_dim);
  return {Eigen::MatrixXd::Zero(dh, dx), Eigen::VectorXd::Zero(dh),
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kLevels), dh)};
}

Eigen::VectorXd ffnn_hidden(const Eigen::VectorXd& x, const FeedforwardParams& params) {
  if (x.size() != params.W1.cols())
    throw DimensionError("ffnn: input has dimension " + std::to_string(x.size()) + ", expected " +
                         std::to_string(params.W1.cols()));
  return (params.W1 * x + params.b1).array().tanh().matrix();
}

Eigen::VectorXd ffnn_logits(const Eigen::VectorXd& x, const FeedforwardParams& params) {
  return params.W2 * ffnn_hidden(x, params);
}

Distribution ffnn_predict(const Eigen::VectorXd& x, const FeedforwardParams& params) {
  return softmax(ffnn_logits(x, params));
}

Distribution interpolate(const Distribution& a, const Distribution& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("interpolate: alpha must lie in [0, 1]");
  Distribution out;
  for (std::size_t j = 0; j < kLevels; ++j) out[j] = alpha * a[j] + (1.0 - alpha) * b[j];
  return out;
}

double tune_alpha(std::span<const Distribution> model_a, std::span<const Distribution> model_b,
                  std::span<const std::size_t> labels) {
  if (labels.empty()) throw ConfigError("tune_alpha: empty development set");
  if (model_a.size() != labels.size() || model_b.size() != labels.size())
    throw DimensionError("tune_alpha: predictions and labels must be aligned");
  double best_alpha = 0.0, best_score = -1.0;
  std::vector<std::size_t> levels(labels.size());
  for (int step = 0; step <= 10; ++step) {
    const double alpha = step / 10.0;
    for (std::size_t i = 0; i < labels.size(); ++i) levels[i] = argmax_level(interpolate(model_a[i], model_b[i], alpha));
    const double score = weighted_f1(labels, levels);
    if (score >= best_score) {
      best_score = score;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

} // namespace threadlstm
