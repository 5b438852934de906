#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "threadlstm/pruner.hpp"

namespace threadlstm {

inline constexpr std::size_t kLevels = 8;
using Distribution = std::array<double, kLevels>;

/// Gate blocks are stacked in this order inside GateParams.
enum class Gate : Eigen::Index { Input = 0, TemporalForget, HierarchicalForget, Candidate, Output };
inline constexpr Eigen::Index kGateCount = 5;

/// Weights of one propagation direction. Row block g of W, U, V and b
/// belongs to gate g. U multiplies the temporal neighbour's hidden state
/// (sibling predecessor forward, successor backward); V multiplies the
/// hierarchical one (parent forward, first child backward).
struct GateParams {
  Eigen::MatrixXd W;  // 5*dh x dx
  Eigen::MatrixXd U;  // 5*dh x dh
  Eigen::MatrixXd V;  // 5*dh x dh
  Eigen::VectorXd b;  // 5*dh

  static GateParams zeros(std::size_t input_dim, std::size_t hidden_dim);

  Eigen::Index input_dim() const { return W.cols(); }
  Eigen::Index hidden_dim() const { return U.cols(); }

  auto W_gate(Gate g) { return W.middleRows(static_cast<Eigen::Index>(g) * hidden_dim(), hidden_dim()); }
  auto U_gate(Gate g) { return U.middleRows(static_cast<Eigen::Index>(g) * hidden_dim(), hidden_dim()); }
  auto V_gate(Gate g) { return V.middleRows(static_cast<Eigen::Index>(g) * hidden_dim(), hidden_dim()); }
  auto b_gate(Gate g) { return b.segment(static_cast<Eigen::Index>(g) * hidden_dim(), hidden_dim()); }
};

/// Learned stand-ins for pruned comments, scaled by the pruned counts and
/// added to hidden-state inputs only: r_p to the forward temporal input,
/// r_s and r_kappa to the backward temporal and hierarchical inputs.
struct PrunedBiases {
  Eigen::VectorXd r_p;
  Eigen::VectorXd r_s;
  Eigen::VectorXd r_kappa;

  static PrunedBiases zeros(std::size_t hidden_dim);
};

enum class PredictMode { Bidirectional, ForwardOnly };

struct GraphLstmParams {
  GateParams forward;
  GateParams backward;
  PrunedBiases pruned;
  Eigen::MatrixXd W_s;  // 8 x 2dh (bidirectional) or 8 x dh (forward only); no bias

  static GraphLstmParams zeros(std::size_t input_dim, std::size_t hidden_dim, PredictMode mode);
};

/// Activations of one cell evaluation, kept for backpropagation.
struct CellTrace {
  Eigen::VectorXd i, f, g, candidate, o;
  Eigen::VectorXd c, tanh_c, h;
};

/// The dual-forget-gate cell:
///   i = sig(W_i x + U_i h_time + V_i h_hier + b_i), likewise f, g, o
///   candidate = W_c x + U_c h_time + V_c h_hier + b_c   (not squashed)
///   c = f * c_time + g * c_hier + i * candidate,  h = o * tanh(c)
/// Throws DimensionError on inconsistent sizes.
CellTrace cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_time, const Eigen::VectorXd& c_time,
               const Eigen::VectorXd& h_hier, const Eigen::VectorXd& c_hier, const GateParams& params);

struct CellGradients {
  Eigen::VectorXd x, h_time, c_time, h_hier, c_hier;
};

/// Backpropagates (dh, dc) at the cell output; parameter gradients are
/// accumulated into grad.
CellGradients cell_backward(const CellTrace& trace, const Eigen::VectorXd& x, const Eigen::VectorXd& h_time,
                            const Eigen::VectorXd& c_time, const Eigen::VectorXd& h_hier,
                            const Eigen::VectorXd& c_hier, const Eigen::VectorXd& dh, const Eigen::VectorXd& dc,
                            const GateParams& params, GateParams& grad);

/// Per-node traces of both directions, indexed by NodeId; entries of pruned
/// nodes stay empty, as does `backward` in forward-only mode.
struct StateCache {
  std::vector<CellTrace> forward;
  std::vector<CellTrace> backward;
};

/// Forward (ancestor-side) pass in chronological order over retained nodes.
/// Temporal input h = h+[p'(t)] + M^p(t) r_p, hierarchical input h+[pi'(t)];
/// absent neighbours contribute zero states.
std::vector<CellTrace> forward_pass(const PrunedTree& pruned, std::span<const Eigen::VectorXd> inputs,
                                    const GateParams& params, const PrunedBiases& biases);

/// Backward (descendant-side) pass in reverse chronological order.
/// Temporal input h-[s'(t)] + M^s(t) r_s, hierarchical h-[kappa'(t)] + M^kappa(t) r_kappa.
std::vector<CellTrace> backward_pass(const PrunedTree& pruned, std::span<const Eigen::VectorXd> inputs,
                                     const GateParams& params, const PrunedBiases& biases);

StateCache run_passes(const PrunedTree& pruned, std::span<const Eigen::VectorXd> inputs,
                      const GraphLstmParams& params, PredictMode mode);

/// Numerically stable softmax of 8 logits.
Distribution softmax(const Eigen::VectorXd& logits);
/// log softmax(logits)[label], via log-sum-exp.
double log_probability(const Eigen::VectorXd& logits, std::size_t label);

/// [h+; h-] or h+ for a node.
Eigen::VectorXd head_features(const StateCache& states, NodeId t, PredictMode mode);

struct NodePrediction {
  NodeId node = kNoNode;
  Distribution probabilities{};
  std::size_t level = 0;  // argmax, lowest level on ties
  bool pruned = false;
};

std::size_t argmax_level(const Distribution& p);

/// One prediction per non-root node in chronological order. Pruned nodes get
/// the one-hot level-0 distribution. Throws ConfigError if the states do not
/// match the mode or W_s has the wrong width.
std::vector<NodePrediction> predict(const PrunedTree& pruned, const StateCache& states, const Eigen::MatrixXd& W_s,
                                    PredictMode mode);

} // namespace threadlstm
