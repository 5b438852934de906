#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace threadlstm {

inline constexpr std::size_t kLevelCount = 8;
inline constexpr std::size_t kSubtaskCount = kLevelCount - 1;
inline constexpr std::size_t kTimeBucketWidth = 20;

/// Head/tail-break binning of karma into levels 0..7.
///
/// Level 0 is karma < 1. The remaining karma values are split recursively:
/// threshold j is the lower median of the values above threshold j-1. Level
/// j (1..6) holds theta_{j-1} < k <= theta_j and level 7 everything above
/// theta_6; theta_7 is the median inside level 7 and is kept for reports.
/// When the remainder runs out early the later thresholds repeat the last one.
class KarmaQuantizer {
public:
  using Thresholds = std::array<std::int64_t, kSubtaskCount>;

  KarmaQuantizer() = default;
  explicit KarmaQuantizer(Thresholds thresholds);

  /// Throws ConfigError when no value is >= 1.
  static KarmaQuantizer fit(std::span<const std::int64_t> training_karma);

  std::size_t level(std::int64_t karma) const;
  const Thresholds& thresholds() const noexcept { return thresholds_; }

  std::string to_json() const;
  static KarmaQuantizer from_json(const std::string& text);

private:
  Thresholds thresholds_{};
};

/// F1 of the binary task "level >= j". `undefined` marks the case with
/// neither true nor predicted positives, where the value is 0.
struct BinaryF1 {
  double value = 0.0;
  bool undefined = false;
  std::size_t true_positives = 0, false_positives = 0, false_negatives = 0;
};

/// Throws DimensionError on length mismatch, ConfigError unless 1 <= j <= 7.
BinaryF1 binary_f1(std::span<const std::size_t> labels, std::span<const std::size_t> predictions, std::size_t j);

/// Mean of F1(1..7).
double macro_f1(std::span<const std::size_t> labels, std::span<const std::size_t> predictions);
/// Sum over j of (j / 28) F1(j).
double weighted_f1(std::span<const std::size_t> labels, std::span<const std::size_t> predictions);

struct ScoredComment {
  std::string thread_id;
  std::string comment_id;
  std::size_t label = 0;
  std::size_t predicted = 0;
  std::size_t n_previous = 0;
  bool pruned = false;
};

struct TimeBucket {
  std::size_t bucket_start = 0;
  double macro_f1 = 0.0;
  std::size_t count = 0;
};

struct EvalReport {
  std::array<BinaryF1, kSubtaskCount> f1{};
  double macro = 0.0;
  double weighted = 0.0;
  std::array<std::array<std::size_t, kLevelCount>, kLevelCount> confusion{};  // [label][predicted]
  std::array<std::size_t, kLevelCount> label_counts{};
  std::vector<TimeBucket> time_buckets;  // floor(n_previous / 20), every index up to the max
  std::size_t n_scored = 0;
  std::size_t n_pruned = 0;

  std::string to_json() const;
  std::string confusion_csv() const;
  std::string time_buckets_csv() const;
};

/// Throws ConfigError on a level outside 0..7 or a pruned comment whose
/// prediction is not level 0.
EvalReport evaluate(std::span<const ScoredComment> comments);

} // namespace threadlstm
