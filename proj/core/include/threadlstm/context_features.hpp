#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "threadlstm/thread_graph.hpp"

namespace threadlstm {

/// Submission-context features of one comment. Index order is fixed:
///
///   0 time_since_root_h        8 n_children
///   1 time_since_parent_h      9 subtree_height (edges)
///   2 n_later_comments        10 subtree_size (includes the node)
///   3 n_previous_comments     11 children_norm_mean
///   4 is_original_poster      12 children_norm_rank
///   5 author_comment_count    13 subtree_size_norm_mean
///   6 depth                   14 subtree_size_norm_rank
///   7 n_siblings
inline constexpr std::size_t kContextDim = 15;
using ContextFeatures = std::array<double, kContextDim>;

enum ContextIndex : std::size_t {
  kTimeSinceRoot = 0,
  kTimeSinceParent,
  kLaterComments,
  kPreviousComments,
  kIsOriginalPoster,
  kAuthorCommentCount,
  kDepth,
  kSiblings,
  kChildren,
  kSubtreeHeight,
  kSubtreeSize,
  kChildrenNormMean,
  kChildrenNormRank,
  kSubtreeSizeNormMean,
  kSubtreeSizeNormRank,
};

/// Features for every node of the thread (root included), indexed by NodeId.
/// Linear in the thread size.
std::vector<ContextFeatures> extract_context(const ThreadTree& tree);

/// Features of a single node.
ContextFeatures extract_context(const ThreadTree& tree, NodeId node);

/// v minus the mean of the thread's values.
double normalize_mean(std::span<const double> values, double v);

/// 1-based competition rank of v in descending order (largest is 1, ties take
/// the smallest rank of their group).
std::size_t descending_rank(std::span<const double> values, double v);

/// v / sqrt(descending_rank(values, v)).
double normalize_rank(std::span<const double> values, double v);

/// Per-dimension z-scoring with statistics from training comments.
class FeatureStandardizer {
public:
  FeatureStandardizer();  // identity
  FeatureStandardizer(ContextFeatures mean, ContextFeatures stddev);

  /// Throws ConfigError on an empty set. Zero-variance dimensions get std 1.
  static FeatureStandardizer fit(std::span<const ContextFeatures> training);

  ContextFeatures apply(const ContextFeatures& x) const;

  const ContextFeatures& mean() const noexcept { return mean_; }
  const ContextFeatures& stddev() const noexcept { return stddev_; }

private:
  ContextFeatures mean_;
  ContextFeatures stddev_;
};

} // namespace threadlstm
