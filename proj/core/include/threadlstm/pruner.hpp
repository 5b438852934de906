#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "threadlstm/context_features.hpp"
#include "threadlstm/thread_graph.hpp"

namespace threadlstm {

/// Linear max-margin classifier over standardized context features. A
/// positive decision flags the comment as likely level 0.
struct LinearPruneClassifier {
  ContextFeatures weights{};
  double bias = 0.0;
  double lambda = 1e-4;

  double score(const ContextFeatures& x) const;
  bool flags(const ContextFeatures& x) const { return score(x) > 0.0; }

  std::string to_json() const;
  static LinearPruneClassifier from_json(const std::string& text);
};

struct PrunerTrainConfig {
  double lambda = 1e-4;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
};

/// Primal hinge loss + L2 (weights only) by seeded stochastic subgradient
/// descent with a 1/(lambda t) schedule; returns the average of the iterates
/// over the last half of training. is_level0[i] labels features[i].
/// Throws ConfigError unless both classes are present.
LinearPruneClassifier train_pruner(std::span<const ContextFeatures> features, const std::vector<bool>& is_level0,
                                   const PrunerTrainConfig& config = {});

/// A thread with maximal fully-flagged subtrees removed.
///
/// Pointer arrays are indexed by the base tree's NodeId and only meaningful
/// for retained nodes. Counts describe the pruned material each retained node
/// stands next to:
///   pruned_levels    M^kappa: levels of pruned children-side material below
///                    the node that no retained child accounts for (the run of
///                    pruned children before its first retained child, or all
///                    children when none is retained), as 1 + the run's height
///   pruned_before    M^p: pruned siblings immediately preceding the node
///   pruned_after     M^s: subtree sizes of the pruned siblings between the
///                    node and its next retained sibling
struct PrunedTree {
  std::vector<bool> retained;
  std::vector<NodeId> order;  // retained nodes, chronological
  std::vector<NodeId> parent;
  std::vector<NodeId> first_child;
  std::vector<NodeId> predecessor;
  std::vector<NodeId> successor;
  std::vector<std::size_t> pruned_levels;
  std::vector<std::size_t> pruned_before;
  std::vector<std::size_t> pruned_after;

  /// The unpruned thread.
  static PrunedTree identity(const ThreadTree& tree);

  std::size_t size() const noexcept { return retained.size(); }
  std::size_t retained_count() const noexcept { return order.size(); }
  std::size_t pruned_count() const noexcept { return size() - order.size(); }
  bool is_retained(NodeId t) const { return retained.at(t); }

  bool operator==(const PrunedTree&) const = default;
};

/// flags has one entry per node; flags[root] must be false (ConfigError
/// otherwise). A node is pruned iff it and its whole subtree are flagged.
PrunedTree prune(const ThreadTree& tree, const std::vector<bool>& flags);

/// Re-prunes an already pruned thread; flags apply to retained nodes only.
PrunedTree prune(const ThreadTree& tree, const PrunedTree& base, const std::vector<bool>& flags);

/// Flags every non-root node the classifier scores positive (features are
/// the standardized context vectors indexed by NodeId) and prunes.
PrunedTree apply_pruner(const ThreadTree& tree, const LinearPruneClassifier& classifier,
                        std::span<const ContextFeatures> standardized);

/// Pruned share of the comments: pruned / (nodes - 1); 0 for a lone root.
double pruned_fraction(const PrunedTree& pruned);

} // namespace threadlstm
