#include "threadlstm/pruner.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "threadlstm/error.hpp"
#include "threadlstm/rng.hpp"

namespace threadlstm {

double LinearPruneClassifier::score(const ContextFeatures& x) const {
  double s = bias;
  for (std::size_t k = 0; k < kContextDim; ++k) s += weights[k] * x[k];
  return s;
}

std::string LinearPruneClassifier::to_json() const {
  nlohmann::ordered_json j;
  j["weights"] = std::vector<double>(weights.begin(), weights.end());
  j["bias"] = bias;
  j["lambda"] = lambda;
  return j.dump(2);
}

LinearPruneClassifier LinearPruneClassifier::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("pruner: ") + e.what());
  }
  if (!j.contains("weights") || !j.contains("bias") || !j.contains("lambda"))
    throw ParseError(0, "pruner: expected {weights, bias, lambda}");
  const auto w = j["weights"].get<std::vector<double>>();
  if (w.size() != kContextDim)
    throw DimensionError("pruner: expected " + std::to_string(kContextDim) + " weights, got " + std::to_string(w.size()));
  LinearPruneClassifier c;
  std::copy(w.begin(), w.end(), c.weights.begin());
  c.bias = j["bias"].get<double>();
  c.lambda = j["lambda"].get<double>();
  return c;
}

LinearPruneClassifier train_pruner(std::span<const ContextFeatures> features, const std::vector<bool>& is_level0,
                                   const PrunerTrainConfig& config) {
  if (features.size() != is_level0.size()) throw DimensionError("train_pruner: features and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(is_level0.begin(), is_level0.end(), true));
  if (positives == 0 || positives == is_level0.size())
    throw ConfigError("train_pruner: training set needs both level-0 and higher-level comments");
  if (config.lambda <= 0.0) throw ConfigError("train_pruner: lambda must be positive");

  constexpr double kInitialRate = 0.1;
  const std::size_t n = features.size();
  const std::size_t steps = std::max<std::size_t>(1, config.epochs) * n;
  const std::size_t average_from = steps / 2;

  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  ContextFeatures w{}, w_avg{};
  double b = 0.0, b_avg = 0.0;
  std::size_t averaged = 0;
  std::size_t t = 0;
  while (t < steps) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      if (t == steps) break;
      const double rate = kInitialRate / (1.0 + kInitialRate * config.lambda * static_cast<double>(t));
      const auto& x = features[idx];
      const double y = is_level0[idx] ? 1.0 : -1.0;
      double margin = b;
      for (std::size_t k = 0; k < kContextDim; ++k) margin += w[k] * x[k];
      margin *= y;
      for (std::size_t k = 0; k < kContextDim; ++k) w[k] *= 1.0 - rate * config.lambda;
      if (margin < 1.0) {
        for (std::size_t k = 0; k < kContextDim; ++k) w[k] += rate * y * x[k];
        b += rate * y;
      }
      if (t >= average_from) {
        ++averaged;
        const double mix = 1.0 / static_cast<double>(averaged);
        for (std::size_t k = 0; k < kContextDim; ++k) w_avg[k] += mix * (w[k] - w_avg[k]);
        b_avg += mix * (b - b_avg);
      }
      ++t;
    }
  }
  return {w_avg, b_avg, config.lambda};
}

PrunedTree PrunedTree::identity(const ThreadTree& tree) {
  return prune(tree, std::vector<bool>(tree.size(), false));
}

PrunedTree prune(const ThreadTree& tree, const std::vector<bool>& flags) {
  const std::size_t n = tree.size();
  if (flags.size() != n) throw DimensionError("prune: one flag per node required");
  if (n > 0 && flags[tree.root()]) throw ConfigError("prune: the root can never be pruned");

  std::vector<bool> subtree_flagged(n, false);
  std::vector<std::size_t> size(n, 1), height(n, 0);
  for (NodeId t = n; t-- > 0;) {
    bool all = flags[t];
    for (NodeId c : tree.children(t)) {
      all = all && subtree_flagged[c];
      size[t] += size[c];
      height[t] = std::max(height[t], height[c] + 1);
    }
    subtree_flagged[t] = all;
  }

  PrunedTree p;
  p.retained.assign(n, false);
  p.parent.assign(n, kNoNode);
  p.first_child.assign(n, kNoNode);
  p.predecessor.assign(n, kNoNode);
  p.successor.assign(n, kNoNode);
  p.pruned_levels.assign(n, 0);
  p.pruned_before.assign(n, 0);
  p.pruned_after.assign(n, 0);
  for (NodeId t = 0; t < n; ++t) {
    if (subtree_flagged[t]) continue;
    p.retained[t] = true;
    p.order.push_back(t);
    p.parent[t] = tree.parent(t);  // a retained node's parent is retained
  }

  for (NodeId t : p.order) {
    NodeId prev = kNoNode;
    std::size_t run_count = 0, run_size = 0, run_height = 0;
    auto close_leading_run = [&] {
      p.pruned_levels[t] = run_count ? 1 + run_height : 0;
    };
    for (NodeId c : tree.children(t)) {
      if (!p.retained[c]) {
        ++run_count;
        run_size += size[c];
        run_height = std::max(run_height, height[c]);
        continue;
      }
      if (prev == kNoNode) {
        p.first_child[t] = c;
        close_leading_run();
      } else {
        p.successor[prev] = c;
        p.pruned_after[prev] = run_size;
      }
      p.predecessor[c] = prev;
      p.pruned_before[c] = run_count;
      prev = c;
      run_count = run_size = run_height = 0;
    }
    if (prev == kNoNode)
      close_leading_run();
    else
      p.pruned_after[prev] = run_size;
  }
  return p;
}

PrunedTree prune(const ThreadTree& tree, const PrunedTree& base, const std::vector<bool>& flags) {
  if (flags.size() != tree.size() || base.size() != tree.size())
    throw DimensionError("prune: base and flags must cover the thread");
  std::vector<bool> merged(tree.size());
  for (NodeId t = 0; t < tree.size(); ++t) merged[t] = !base.retained[t] || flags[t];
  return prune(tree, merged);
}

PrunedTree apply_pruner(const ThreadTree& tree, const LinearPruneClassifier& classifier,
                        std::span<const ContextFeatures> standardized) {
  if (standardized.size() != tree.size()) throw DimensionError("apply_pruner: one feature vector per node required");
  std::vector<bool> flags(tree.size(), false);
  for (NodeId t = 0; t < tree.size(); ++t)
    if (t != tree.root()) flags[t] = classifier.flags(standardized[t]);
  return prune(tree, flags);
}

double pruned_fraction(const PrunedTree& pruned) {
  if (pruned.size() <= 1) return 0.0;
  return static_cast<double>(pruned.pruned_count()) / static_cast<double>(pruned.size() - 1);
}

} // namespace threadlstm
