#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "threadlstm/graph_lstm.hpp"

namespace threadlstm {

/// Node-independent classifier: softmax(W2 tanh(W1 x + b1)).
struct FeedforwardParams {
  Eigen::MatrixXd W1;  // dh x dx
  Eigen::VectorXd b1;  // dh
  Eigen::MatrixXd W2;  // 8 x dh, no output bias (matches the graph head)

  static FeedforwardParams zeros(std::size_t input_dim, std::size_t hidden_dim);
};

Eigen::VectorXd ffnn_hidden(const Eigen::VectorXd& x, const FeedforwardParams& params);
Eigen::VectorXd ffnn_logits(const Eigen::VectorXd& x, const FeedforwardParams& params);
/// Throws DimensionError when x does not match W1.
Distribution ffnn_predict(const Eigen::VectorXd& x, const FeedforwardParams& params);

/// alpha * a + (1 - alpha) * b. Throws ConfigError unless alpha is in [0, 1].
Distribution interpolate(const Distribution& a, const Distribution& b, double alpha);

/// Grid search over alpha in {0, 0.1, ..., 1} for the best weighted F1 of the
/// interpolated argmax levels; ties go to the larger alpha. Both prediction
/// sets and the labels are aligned by index. Throws ConfigError when empty.
double tune_alpha(std::span<const Distribution> model_a, std::span<const Distribution> model_b,
                  std::span<const std::size_t> labels);

} // namespace threadlstm
