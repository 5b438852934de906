#include "threadlstm/evaluation.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "threadlstm/error.hpp"

namespace threadlstm {

KarmaQuantizer::KarmaQuantizer(Thresholds thresholds) : thresholds_(thresholds) {
  if (!std::is_sorted(thresholds_.begin(), thresholds_.end()))
    throw ConfigError("karma thresholds must be non-decreasing");
}

KarmaQuantizer KarmaQuantizer::fit(std::span<const std::int64_t> training_karma) {
  std::vector<std::int64_t> remaining;
  for (auto k : training_karma)
    if (k >= 1) remaining.push_back(k);
  if (remaining.empty()) throw ConfigError("karma quantizer needs at least one training karma >= 1");
  std::sort(remaining.begin(), remaining.end());

  Thresholds th{};
  auto first = remaining.begin();
  for (std::size_t j = 0; j < kSubtaskCount; ++j) {
    if (first == remaining.end()) {
      th[j] = th[j - 1];
      continue;
    }
    const auto count = remaining.end() - first;
    th[j] = *(first + (count - 1) / 2);
    first = std::upper_bound(first, remaining.end(), th[j]);
  }
  return KarmaQuantizer(th);
}

std::size_t KarmaQuantizer::level(std::int64_t karma) const {
  if (karma < 1) return 0;
  std::size_t level = 1;
  for (std::size_t j = 0; j + 1 < kSubtaskCount; ++j)
    if (karma > thresholds_[j]) level = j + 2;
  return level;
}

std::string KarmaQuantizer::to_json() const {
  nlohmann::ordered_json j;
  j["thresholds"] = std::vector<std::int64_t>(thresholds_.begin(), thresholds_.end());
  return j.dump(2);
}

KarmaQuantizer KarmaQuantizer::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("quantizer: ") + e.what());
  }
  const auto v = j.at("thresholds").get<std::vector<std::int64_t>>();
  if (v.size() != kSubtaskCount) throw DimensionError("quantizer: expected 7 thresholds");
  Thresholds th;
  std::copy(v.begin(), v.end(), th.begin());
  return KarmaQuantizer(th);
}

BinaryF1 binary_f1(std::span<const std::size_t> labels, std::span<const std::size_t> predictions, std::size_t j) {
  if (labels.size() != predictions.size()) throw DimensionError("binary_f1: labels and predictions differ in length");
  if (j < 1 || j > kSubtaskCount) throw ConfigError("binary_f1: subtask must be in 1..7");
  BinaryF1 r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth = labels[i] >= j, guess = predictions[i] >= j;
    if (truth && guess) ++r.true_positives;
    else if (guess) ++r.false_positives;
    else if (truth) ++r.false_negatives;
  }
  const double tp = static_cast<double>(r.true_positives);
  const double denom = 2.0 * tp + static_cast<double>(r.false_positives + r.false_negatives);
  if (denom == 0.0) {
    r.undefined = true;
    r.value = 0.0;
  } else {
    // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN).
    r.value = 2.0 * tp / denom;
  }
  return r;
}

double macro_f1(std::span<const std::size_t> labels, std::span<const std::size_t> predictions) {
  double sum = 0.0;
  for (std::size_t j = 1; j <= kSubtaskCount; ++j) sum += binary_f1(labels, predictions, j).value;
  return sum / static_cast<double>(kSubtaskCount);
}

double weighted_f1(std::span<const std::size_t> labels, std::span<const std::size_t> predictions) {
  constexpr double kWeightSum = kSubtaskCount * (kSubtaskCount + 1) / 2.0;
  double sum = 0.0;
  for (std::size_t j = 1; j <= kSubtaskCount; ++j)
    sum += static_cast<double>(j) * binary_f1(labels, predictions, j).value;
  return sum / kWeightSum;
}

EvalReport evaluate(std::span<const ScoredComment> comments) {
  EvalReport report;
  std::vector<std::size_t> labels, predicted;
  labels.reserve(comments.size());
  predicted.reserve(comments.size());
  std::size_t max_bucket = 0;
  for (const auto& c : comments) {
    if (c.label >= kLevelCount || c.predicted >= kLevelCount)
      throw ConfigError("evaluate: level out of range for comment '" + c.comment_id + "'");
    if (c.pruned && c.predicted != 0)
      throw ConfigError("evaluate: pruned comment '" + c.comment_id + "' must be predicted level 0");
    labels.push_back(c.label);
    predicted.push_back(c.predicted);
    ++report.confusion[c.label][c.predicted];
    ++report.label_counts[c.label];
    if (c.pruned) ++report.n_pruned;
    max_bucket = std::max(max_bucket, c.n_previous / kTimeBucketWidth);
  }
  report.n_scored = comments.size();
  for (std::size_t j = 1; j <= kSubtaskCount; ++j) report.f1[j - 1] = binary_f1(labels, predicted, j);
  report.macro = macro_f1(labels, predicted);
  report.weighted = weighted_f1(labels, predicted);

  if (!comments.empty()) {
    std::vector<std::vector<std::size_t>> bucket_labels(max_bucket + 1), bucket_pred(max_bucket + 1);
    for (const auto& c : comments) {
      const std::size_t b = c.n_previous / kTimeBucketWidth;
      bucket_labels[b].push_back(c.label);
      bucket_pred[b].push_back(c.predicted);
    }
    for (std::size_t b = 0; b <= max_bucket; ++b)
      report.time_buckets.push_back(
          {b * kTimeBucketWidth, macro_f1(bucket_labels[b], bucket_pred[b]), bucket_labels[b].size()});
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["macro_f1"] = macro;
  j["weighted_f1"] = weighted;
  auto& subtasks = j["f1"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < kSubtaskCount; ++k) {
    subtasks.push_back({{"level", k + 1},
                        {"f1", f1[k].value},
                        {"undefined", f1[k].undefined},
                        {"tp", f1[k].true_positives},
                        {"fp", f1[k].false_positives},
                        {"fn", f1[k].false_negatives}});
  }
  j["label_counts"] = label_counts;
  j["confusion"] = confusion;
  j["n_scored"] = n_scored;
  j["n_pruned"] = n_pruned;
  auto& buckets = j["time_buckets"] = nlohmann::ordered_json::array();
  for (const auto& b : time_buckets)
    buckets.push_back({{"bucket_start", b.bucket_start}, {"macro_f1", b.macro_f1}, {"n", b.count}});
  return j.dump(2);
}

std::string EvalReport::confusion_csv() const {
  std::ostringstream out;
  out << "label";
  for (std::size_t p = 0; p < kLevelCount; ++p) out << ",pred_" << p;
  out << '\n';
  for (std::size_t l = 0; l < kLevelCount; ++l) {
    out << l;
    for (std::size_t p = 0; p < kLevelCount; ++p) out << ',' << confusion[l][p];
    out << '\n';
  }
  return out.str();
}

std::string EvalReport::time_buckets_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "bucket_start,macro_f1,n\n";
  for (const auto& b : time_buckets) out << b.bucket_start << ',' << b.macro_f1 << ',' << b.count << '\n';
  return out.str();
}

} // namespace threadlstm
