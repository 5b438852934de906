#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "threadlstm/context_features.hpp"
#include "threadlstm/evaluation.hpp"
#include "threadlstm/pruner.hpp"
#include "threadlstm/text_features.hpp"
#include "threadlstm/thread_graph.hpp"

namespace threadlstm {

inline constexpr std::size_t kNoLabel = static_cast<std::size_t>(-1);

/// A thread ready for the models: standardized context features, encoded
/// tokens, karma levels and the pruned structure, all indexed by NodeId.
struct ThreadExample {
  ThreadTree tree;
  PrunedTree pruned;
  std::vector<ContextFeatures> context;
  std::vector<ContextFeatures> raw_context;
  std::vector<std::vector<std::int32_t>> tokens;
  std::vector<std::size_t> labels;  // kNoLabel for the root

  const std::string& thread_id() const { return tree.record(tree.root()).id; }
};

struct FeaturizerConfig {
  std::size_t min_count = kDefaultMinCount;
  bool use_pruning = true;
  PrunerTrainConfig pruner;
};

/// Everything fitted on the training split before model training: feature
/// statistics, vocabulary, karma levels and (optionally) the pruner.
struct Featurizer {
  FeatureStandardizer standardizer;
  Vocabulary vocab;
  KarmaQuantizer quantizer;
  std::optional<LinearPruneClassifier> pruner;

  /// Fits on the training threads; statistics come from non-root comments.
  static Featurizer fit(std::span<const ThreadTree> training, const FeaturizerConfig& config = {});

  ThreadExample prepare(ThreadTree tree) const;
  std::vector<ThreadExample> prepare_all(std::vector<ThreadTree> trees) const;

  /// Hash of the fitted state; checkpoints store it so predictions are never
  /// run against mismatched preprocessing.
  std::uint64_t fingerprint() const;

  /// Writes standardizer.json, quantizer.json, vocab.txt and (if any)
  /// pruner.json into dir.
  void save(const std::string& dir) const;
  static Featurizer load(const std::string& dir);
};

/// Reads every *.jsonl thread file in a directory.
std::vector<ThreadTree> load_corpus(const std::string& dir);

} // namespace threadlstm
