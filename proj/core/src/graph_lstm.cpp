#include "threadlstm/graph_lstm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "threadlstm/error.hpp"

namespace threadlstm {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

VectorXd sigmoid(const VectorXd& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

struct Neighbour {
  VectorXd h, c;
};

} // namespace

GateParams GateParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  const auto dx = static_cast<Index>(input_dim), dh = static_cast<Index>(hidden_dim);
  return {Eigen::MatrixXd::Zero(kGateCount * dh, dx), Eigen::MatrixXd::Zero(kGateCount * dh, dh),
          Eigen::MatrixXd::Zero(kGateCount * dh, dh), VectorXd::Zero(kGateCount * dh)};
}

PrunedBiases PrunedBiases::zeros(std::size_t hidden_dim) {
  const auto dh = static_cast<Index>(hidden_dim);
  return {VectorXd::Zero(dh), VectorXd::Zero(dh), VectorXd::Zero(dh)};
}

GraphLstmParams GraphLstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim, PredictMode mode) {
  const auto head = static_cast<Index>(mode == PredictMode::Bidirectional ? 2 * hidden_dim : hidden_dim);
  return {GateParams::zeros(input_dim, hidden_dim), GateParams::zeros(input_dim, hidden_dim),
          PrunedBiases::zeros(hidden_dim), Eigen::MatrixXd::Zero(static_cast<Index>(kLevels), head)};
}

CellTrace cell(const VectorXd& x, const VectorXd& h_time, const VectorXd& c_time, const VectorXd& h_hier,
               const VectorXd& c_hier, const GateParams& params) {
  const Index dh = params.hidden_dim();
  require(params.W.rows() == kGateCount * dh && params.V.cols() == dh && params.b.size() == kGateCount * dh,
          "cell: inconsistent gate parameter shapes");
  require(x.size() == params.input_dim(),
          "cell: input has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(params.input_dim()));
  require(h_time.size() == dh && c_time.size() == dh && h_hier.size() == dh && c_hier.size() == dh,
          "cell: state vectors must have the hidden dimension " + std::to_string(dh));

  const VectorXd a = params.W * x + params.U * h_time + params.V * h_hier + params.b;
  CellTrace t;
  t.i = sigmoid(a.segment(0 * dh, dh));
  t.f = sigmoid(a.segment(1 * dh, dh));
  t.g = sigmoid(a.segment(2 * dh, dh));
  t.candidate = a.segment(3 * dh, dh);
  t.o = sigmoid(a.segment(4 * dh, dh));
  t.c = t.f.cwiseProduct(c_time) + t.g.cwiseProduct(c_hier) + t.i.cwiseProduct(t.candidate);
  t.tanh_c = t.c.array().tanh().matrix();
  t.h = t.o.cwiseProduct(t.tanh_c);
  return t;
}

CellGradients cell_backward(const CellTrace& t, const VectorXd& x, const VectorXd& h_time, const VectorXd& c_time,
                            const VectorXd& h_hier, const VectorXd& c_hier, const VectorXd& dh_out,
                            const VectorXd& dc_out, const GateParams& params, GateParams& grad) {
  const Index dh = params.hidden_dim();
  const VectorXd d_o = dh_out.cwiseProduct(t.tanh_c);
  const VectorXd dc =
      dc_out + dh_out.cwiseProduct(t.o).cwiseProduct((1.0 - t.tanh_c.array().square()).matrix());

  auto sig_grad = [](const VectorXd& s) { return (s.array() * (1.0 - s.array())).matrix(); };
  VectorXd da(kGateCount * dh);
  da.segment(0 * dh, dh) = dc.cwiseProduct(t.candidate).cwiseProduct(sig_grad(t.i));
  da.segment(1 * dh, dh) = dc.cwiseProduct(c_time).cwiseProduct(sig_grad(t.f));
  da.segment(2 * dh, dh) = dc.cwiseProduct(c_hier).cwiseProduct(sig_grad(t.g));
  da.segment(3 * dh, dh) = dc.cwiseProduct(t.i);
  da.segment(4 * dh, dh) = d_o.cwiseProduct(sig_grad(t.o));

  grad.W.noalias() += da * x.transpose();
  grad.U.noalias() += da * h_time.transpose();
  grad.V.noalias() += da * h_hier.transpose();
  grad.b += da;

  CellGradients out;
  out.x.noalias() = params.W.transpose() * da;
  out.h_time.noalias() = params.U.transpose() * da;
  out.h_hier.noalias() = params.V.transpose() * da;
  out.c_time = dc.cwiseProduct(t.f);
  out.c_hier = dc.cwiseProduct(t.g);
  return out;
}

namespace {

void check_inputs(const PrunedTree& pruned, std::span<const VectorXd> inputs, const GateParams& params) {
  if (inputs.size() != pruned.size())
    throw ConfigError("graph pass: expected " + std::to_string(pruned.size()) + " input vectors, got " +
                      std::to_string(inputs.size()));
  for (NodeId t : pruned.order)
    if (inputs[t].size() != params.input_dim())
      throw ConfigError("graph pass: missing or malformed input vector for node " + std::to_string(t));
}

} // namespace

std::vector<CellTrace> forward_pass(const PrunedTree& pruned, std::span<const VectorXd> inputs,
                                    const GateParams& params, const PrunedBiases& biases) {
  check_inputs(pruned, inputs, params);
  const Index dh = params.hidden_dim();
  const VectorXd zero = VectorXd::Zero(dh);
  std::vector<CellTrace> states(pruned.size());
  for (NodeId t : pruned.order) {
    const NodeId pred = pruned.predecessor[t];
    const NodeId parent = pruned.parent[t];
    VectorXd h_time = pred == kNoNode ? zero : states[pred].h;
    if (pruned.pruned_before[t]) h_time += static_cast<double>(pruned.pruned_before[t]) * biases.r_p;
    const VectorXd& c_time = pred == kNoNode ? zero : states[pred].c;
    const VectorXd& h_hier = parent == kNoNode ? zero : states[parent].h;
    const VectorXd& c_hier = parent == kNoNode ? zero : states[parent].c;
    states[t] = cell(inputs[t], h_time, c_time, h_hier, c_hier, params);
  }
  return states;
}

std::vector<CellTrace> backward_pass(const PrunedTree& pruned, std::span<const VectorXd> inputs,
                                     const GateParams& params, const PrunedBiases& biases) {
  check_inputs(pruned, inputs, params);
  const Index dh = params.hidden_dim();
  const VectorXd zero = VectorXd::Zero(dh);
  std::vector<CellTrace> states(pruned.size());
  for (auto it = pruned.order.rbegin(); it != pruned.order.rend(); ++it) {
    const NodeId t = *it;
    const NodeId succ = pruned.successor[t];
    const NodeId child = pruned.first_child[t];
    VectorXd h_time = succ == kNoNode ? zero : states[succ].h;
    if (pruned.pruned_after[t]) h_time += static_cast<double>(pruned.pruned_after[t]) * biases.r_s;
    VectorXd h_hier = child == kNoNode ? zero : states[child].h;
    if (pruned.pruned_levels[t]) h_hier += static_cast<double>(pruned.pruned_levels[t]) * biases.r_kappa;
    const VectorXd& c_time = succ == kNoNode ? zero : states[succ].c;
    const VectorXd& c_hier = child == kNoNode ? zero : states[child].c;
    states[t] = cell(inputs[t], h_time, c_time, h_hier, c_hier, params);
  }
  return states;
}

StateCache run_passes(const PrunedTree& pruned, std::span<const VectorXd> inputs, const GraphLstmParams& params,
                      PredictMode mode) {
  StateCache cache;
  cache.forward = forward_pass(pruned, inputs, params.forward, params.pruned);
  if (mode == PredictMode::Bidirectional) cache.backward = backward_pass(pruned, inputs, params.backward, params.pruned);
  return cache;
}

Distribution softmax(const VectorXd& logits) {
  if (logits.size() != static_cast<Index>(kLevels)) throw DimensionError("softmax: expected 8 logits");
  const double m = logits.maxCoeff();
  Distribution p;
  double z = 0.0;
  for (std::size_t j = 0; j < kLevels; ++j) {
    p[j] = std::exp(logits[static_cast<Index>(j)] - m);
    z += p[j];
  }
  for (auto& v : p) v /= z;
  return p;
}

double log_probability(const VectorXd& logits, std::size_t label) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits[static_cast<Index>(label)] - lse;
}

VectorXd head_features(const StateCache& states, NodeId t, PredictMode mode) {
  const VectorXd& fwd = states.forward.at(t).h;
  if (mode == PredictMode::ForwardOnly) return fwd;
  const VectorXd& bwd = states.backward.at(t).h;
  VectorXd z(fwd.size() + bwd.size());
  z << fwd, bwd;
  return z;
}

std::size_t argmax_level(const Distribution& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<NodePrediction> predict(const PrunedTree& pruned, const StateCache& states, const Eigen::MatrixXd& W_s,
                                    PredictMode mode) {
  if (states.forward.size() != pruned.size()) throw ConfigError("predict: forward states missing");
  if (mode == PredictMode::Bidirectional && states.backward.size() != pruned.size())
    throw ConfigError("predict: bidirectional mode requires backward states");
  std::vector<NodePrediction> out;
  out.reserve(pruned.size() > 0 ? pruned.size() - 1 : 0);
  for (NodeId t = 1; t < pruned.size(); ++t) {
    NodePrediction p;
    p.node = t;
    if (!pruned.retained[t]) {
      p.pruned = true;
      p.probabilities.fill(0.0);
      p.probabilities[0] = 1.0;
      p.level = 0;
    } else {
      const VectorXd z = head_features(states, t, mode);
      if (W_s.cols() != z.size())
        throw ConfigError("predict: softmax head expects " + std::to_string(W_s.cols()) + " features, states give " +
                          std::to_string(z.size()));
      p.probabilities = softmax(W_s * z);
      p.level = argmax_level(p.probabilities);
    }
    out.push_back(p);
  }
  return out;
}

} // namespace threadlstm
