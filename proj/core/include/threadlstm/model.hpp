#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "threadlstm/baseline_ffnn.hpp"
#include "threadlstm/dataset.hpp"
#include "threadlstm/graph_lstm.hpp"
#include "threadlstm/text_features.hpp"

namespace threadlstm {

enum class ModelKind { GraphBidirectional, GraphForward, NodeIndependent };

std::string_view to_string(ModelKind kind);
/// Accepts "graph_bi", "graph_fwd", "node_indep"; throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

struct ModelDims {
  std::size_t hidden_dim = 16;
  bool use_text = true;
  std::size_t embed_dim = kDefaultEmbeddingDim;
  std::size_t vocab_size = 1;

  std::size_t input_dim() const { return kContextDim + (use_text ? embed_dim : 0); }
  bool operator==(const ModelDims&) const = default;
};

/// All trainable state of one model. Unused parts stay empty: the graph
/// weights for the node-independent model, the feedforward weights for the
/// graph models, the embedding table without text. The forward-only model
/// keeps a backward weight set that never influences its outputs.
struct Model {
  ModelKind kind = ModelKind::GraphBidirectional;
  ModelDims dims;
  GraphLstmParams graph;
  FeedforwardParams ffnn;
  EmbeddingTable embedding;

  static Model zeros(ModelKind kind, const ModelDims& dims);
  /// Every parameter uniform in [-scale, scale], drawn in parameter order.
  static Model random(ModelKind kind, const ModelDims& dims, double scale, std::uint64_t seed);

  bool is_graph() const { return kind != ModelKind::NodeIndependent; }
  PredictMode mode() const {
    return kind == ModelKind::GraphBidirectional ? PredictMode::Bidirectional : PredictMode::ForwardOnly;
  }
};

/// A named, contiguous parameter tensor inside a Model (column-major).
template <typename T>
struct BasicParamView {
  std::string_view name;
  T* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
};
using ParamView = BasicParamView<double>;
using ConstParamView = BasicParamView<const double>;

/// Active parameters of the model in fixed order. Two models of the same
/// kind and dims yield aligned lists, which is how gradients and optimizer
/// state are paired with parameters.
std::vector<ParamView> parameters(Model& model);
std::vector<ConstParamView> parameters(const Model& model);
std::size_t parameter_count(const Model& model);

/// x_t = [standardized context ; mean token embedding] per node, or just the
/// context without text. Empty vectors for pruned nodes.
std::vector<Eigen::VectorXd> build_inputs(const Model& model, const ThreadExample& example);

/// Predictions for every non-root comment in chronological order.
std::vector<NodePrediction> predict_thread(const Model& model, const ThreadExample& example);

struct CheckpointMeta {
  std::uint64_t vocab_fingerprint = 0;
  std::uint64_t featurizer_fingerprint = 0;
};

/// Versioned JSON container; tensors are written row-major as 64-bit floats
/// with round-trip precision.
void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& path);
std::string checkpoint_json(const Model& model, const CheckpointMeta& meta);
Model load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);
Model checkpoint_from_json(const std::string& text, CheckpointMeta* meta = nullptr);

} // namespace threadlstm
