#include "threadlstm/context_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "threadlstm/error.hpp"

namespace threadlstm {

namespace {

constexpr double kSecondsPerHour = 3600.0;

} // namespace

std::vector<ContextFeatures> extract_context(const ThreadTree& tree) {
  const std::size_t n = tree.size();
  std::vector<ContextFeatures> out(n);
  if (n == 0) return out;

  std::vector<double> size(n, 1.0), height(n, 0.0);
  for (NodeId t = n; t-- > 0;) {
    for (NodeId c : tree.children(t)) {
      size[t] += size[c];
      height[t] = std::max(height[t], height[c] + 1.0);
    }
  }

  std::unordered_map<std::string, std::size_t> author_counts;
  for (const auto& r : tree.records()) ++author_counts[r.author_id];

  std::vector<double> n_children(n);
  for (NodeId t = 0; t < n; ++t) n_children[t] = static_cast<double>(tree.children(t).size());

  const auto& root = tree.record(tree.root());
  for (NodeId t = 0; t < n; ++t) {
    const auto& r = tree.record(t);
    auto& f = out[t];
    const NodeId parent = tree.parent(t);
    f[kTimeSinceRoot] = static_cast<double>(r.created_utc - root.created_utc) / kSecondsPerHour;
    f[kTimeSinceParent] =
        parent == kNoNode ? 0.0 : static_cast<double>(r.created_utc - tree.record(parent).created_utc) / kSecondsPerHour;
    // Comments only; the original post is not a previous or later comment.
    f[kLaterComments] = static_cast<double>(n - 1 - t);
    f[kPreviousComments] = t == 0 ? 0.0 : static_cast<double>(t - 1);
    f[kIsOriginalPoster] = r.author_id == root.author_id ? 1.0 : 0.0;
    f[kAuthorCommentCount] = static_cast<double>(author_counts[r.author_id]);
    f[kDepth] = static_cast<double>(tree.depth(t));
    f[kSiblings] = parent == kNoNode ? 0.0 : static_cast<double>(tree.children(parent).size() - 1);
    f[kChildren] = n_children[t];
    f[kSubtreeHeight] = height[t];
    f[kSubtreeSize] = size[t];
  }

  // Thread-level normalizations, via sorted copies so ranks are O(log n).
  auto normalize = [&](const std::vector<double>& values, std::size_t mean_slot, std::size_t rank_slot) {
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (NodeId t = 0; t < n; ++t) {
      const double v = values[t];
      const auto first = std::lower_bound(sorted.begin(), sorted.end(), v, std::greater<>());
      const auto rank = static_cast<double>(first - sorted.begin() + 1);
      out[t][mean_slot] = v - mean;
      out[t][rank_slot] = v / std::sqrt(rank);
    }
  };
  normalize(n_children, kChildrenNormMean, kChildrenNormRank);
  normalize(size, kSubtreeSizeNormMean, kSubtreeSizeNormRank);
  return out;
}

ContextFeatures extract_context(const ThreadTree& tree, NodeId node) {
  if (node >= tree.size()) throw ConfigError("node " + std::to_string(node) + " not in thread");
  return extract_context(tree)[node];
}

double normalize_mean(std::span<const double> values, double v) {
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return v - mean;
}

std::size_t descending_rank(std::span<const double> values, double v) {
  return 1 + static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [v](double x) { return x > v; }));
}

double normalize_rank(std::span<const double> values, double v) {
  return v / std::sqrt(static_cast<double>(descending_rank(values, v)));
}

FeatureStandardizer::FeatureStandardizer() {
  mean_.fill(0.0);
  stddev_.fill(1.0);
}

FeatureStandardizer::FeatureStandardizer(ContextFeatures mean, ContextFeatures stddev)
    : mean_(mean), stddev_(stddev) {}

FeatureStandardizer FeatureStandardizer::fit(std::span<const ContextFeatures> training) {
  if (training.empty()) throw ConfigError("cannot fit a feature standardizer on an empty training set");
  const auto count = static_cast<double>(training.size());
  ContextFeatures mean{}, var{};
  for (const auto& x : training)
    for (std::size_t k = 0; k < kContextDim; ++k) mean[k] += x[k];
  for (auto& m : mean) m /= count;
  for (const auto& x : training)
    for (std::size_t k = 0; k < kContextDim; ++k) var[k] += (x[k] - mean[k]) * (x[k] - mean[k]);
  ContextFeatures stddev;
  for (std::size_t k = 0; k < kContextDim; ++k) {
    const double s = std::sqrt(var[k] / count);
    stddev[k] = s > 1e-12 ? s : 1.0;
  }
  return {mean, stddev};
}

ContextFeatures FeatureStandardizer::apply(const ContextFeatures& x) const {
  ContextFeatures y;
  for (std::size_t k = 0; k < kContextDim; ++k) y[k] = (x[k] - mean_[k]) / stddev_[k];
  return y;
}

} // namespace threadlstm
