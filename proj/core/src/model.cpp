#include "threadlstm/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "threadlstm/error.hpp"
#include "threadlstm/rng.hpp"

namespace threadlstm {

namespace {

constexpr const char* kCheckpointFormat = "threadlstm-checkpoint";
constexpr int kCheckpointVersion = 1;

template <typename M, typename View>
std::vector<View> collect(M& model) {
  std::vector<View> views;
  auto add = [&](std::string_view name, auto& tensor) {
    views.push_back(View{name, tensor.data(), tensor.rows(), tensor.cols()});
  };
  if (model.kind == ModelKind::NodeIndependent) {
    add("ffnn.W1", model.ffnn.W1);
    add("ffnn.b1", model.ffnn.b1);
    add("ffnn.W2", model.ffnn.W2);
  } else {
    auto& g = model.graph;
    add("forward.W", g.forward.W);
    add("forward.U", g.forward.U);
    add("forward.V", g.forward.V);
    add("forward.b", g.forward.b);
    add("backward.W", g.backward.W);
    add("backward.U", g.backward.U);
    add("backward.V", g.backward.V);
    add("backward.b", g.backward.b);
    add("r_p", g.pruned.r_p);
    add("r_s", g.pruned.r_s);
    add("r_kappa", g.pruned.r_kappa);
    add("W_s", g.W_s);
  }
  if (model.dims.use_text) add("embedding", model.embedding);
  return views;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t unhex(const std::string& s) { return std::stoull(s, nullptr, 16); }

} // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::GraphBidirectional: return "graph_bi";
    case ModelKind::GraphForward: return "graph_fwd";
    case ModelKind::NodeIndependent: return "node_indep";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "graph_bi") return ModelKind::GraphBidirectional;
  if (name == "graph_fwd") return ModelKind::GraphForward;
  if (name == "node_indep") return ModelKind::NodeIndependent;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

Model Model::zeros(ModelKind kind, const ModelDims& dims) {
  if (dims.hidden_dim == 0) throw ConfigError("hidden dimension must be positive");
  if (dims.use_text && (dims.embed_dim == 0 || dims.vocab_size == 0))
    throw ConfigError("text models need a positive embedding dimension and vocabulary");
  Model m;
  m.kind = kind;
  m.dims = dims;
  if (kind == ModelKind::NodeIndependent)
    m.ffnn = FeedforwardParams::zeros(dims.input_dim(), dims.hidden_dim);
  else
    m.graph = GraphLstmParams::zeros(dims.input_dim(), dims.hidden_dim, m.mode());
  if (dims.use_text)
    m.embedding = EmbeddingTable::Zero(static_cast<Eigen::Index>(dims.vocab_size),
                                       static_cast<Eigen::Index>(dims.embed_dim));
  return m;
}

Model Model::random(ModelKind kind, const ModelDims& dims, double scale, std::uint64_t seed) {
  Model m = zeros(kind, dims);
  Rng rng(seed);
  for (auto& p : parameters(m))
    for (Eigen::Index k = 0; k < p.size(); ++k) p.data[k] = rng.uniform(-scale, scale);
  return m;
}

std::vector<ParamView> parameters(Model& model) { return collect<Model, ParamView>(model); }
std::vector<ConstParamView> parameters(const Model& model) { return collect<const Model, ConstParamView>(model); }

std::size_t parameter_count(const Model& model) {
  std::size_t n = 0;
  for (const auto& p : parameters(model)) n += static_cast<std::size_t>(p.size());
  return n;
}

std::vector<Eigen::VectorXd> build_inputs(const Model& model, const ThreadExample& example) {
  const std::size_t n = example.tree.size();
  if (example.context.size() != n || (model.dims.use_text && example.tokens.size() != n))
    throw ConfigError("build_inputs: example features do not cover the thread");
  const auto dx = static_cast<Eigen::Index>(model.dims.input_dim());
  std::vector<Eigen::VectorXd> inputs(n);
  for (NodeId t = 0; t < n; ++t) {
    if (!example.pruned.retained[t]) continue;
    Eigen::VectorXd x(dx);
    for (std::size_t k = 0; k < kContextDim; ++k) x[static_cast<Eigen::Index>(k)] = example.context[t][k];
    if (model.dims.use_text)
      x.tail(static_cast<Eigen::Index>(model.dims.embed_dim)) = embed_comment(example.tokens[t], model.embedding);
    inputs[t] = std::move(x);
  }
  return inputs;
}

std::vector<NodePrediction> predict_thread(const Model& model, const ThreadExample& example) {
  const auto inputs = build_inputs(model, example);
  const auto& pruned = example.pruned;
  if (model.is_graph()) {
    const StateCache states = run_passes(pruned, inputs, model.graph, model.mode());
    return predict(pruned, states, model.graph.W_s, model.mode());
  }
  std::vector<NodePrediction> out;
  for (NodeId t = 1; t < pruned.size(); ++t) {
    NodePrediction p;
    p.node = t;
    if (!pruned.retained[t]) {
      p.pruned = true;
      p.probabilities.fill(0.0);
      p.probabilities[0] = 1.0;
    } else {
      p.probabilities = ffnn_predict(inputs[t], model.ffnn);
      p.level = argmax_level(p.probabilities);
    }
    out.push_back(p);
  }
  return out;
}

std::string checkpoint_json(const Model& model, const CheckpointMeta& meta) {
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["kind"] = std::string(to_string(model.kind));
  j["dims"] = {{"hidden_dim", model.dims.hidden_dim},
               {"use_text", model.dims.use_text},
               {"embed_dim", model.dims.embed_dim},
               {"vocab_size", model.dims.vocab_size},
               {"input_dim", model.dims.input_dim()},
               {"levels", kLevels}};
  j["vocab_fingerprint"] = hex(meta.vocab_fingerprint);
  j["featurizer_fingerprint"] = hex(meta.featurizer_fingerprint);
  auto& tensors = j["parameters"] = nlohmann::ordered_json::array();
  for (const auto& p : parameters(model)) {
    std::vector<double> row_major;
    row_major.reserve(static_cast<std::size_t>(p.size()));
    for (Eigen::Index r = 0; r < p.rows; ++r)
      for (Eigen::Index c = 0; c < p.cols; ++c) row_major.push_back(p.data[c * p.rows + r]);
    tensors.push_back({{"name", std::string(p.name)}, {"rows", p.rows}, {"cols", p.cols}, {"data", row_major}});
  }
  return j.dump();
}

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << checkpoint_json(model, meta) << '\n';
}

Model checkpoint_from_json(const std::string& text, CheckpointMeta* meta) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("checkpoint: ") + e.what());
  }
  if (j.value("format", "") != kCheckpointFormat) throw ParseError(0, "checkpoint: not a threadlstm checkpoint");
  if (j.value("version", 0) != kCheckpointVersion)
    throw ParseError(0, "checkpoint: unsupported version " + std::to_string(j.value("version", 0)));
  ModelDims dims;
  const auto& d = j.at("dims");
  dims.hidden_dim = d.at("hidden_dim").get<std::size_t>();
  dims.use_text = d.at("use_text").get<bool>();
  dims.embed_dim = d.at("embed_dim").get<std::size_t>();
  dims.vocab_size = d.at("vocab_size").get<std::size_t>();
  Model m = Model::zeros(parse_model_kind(j.at("kind").get<std::string>()), dims);

  const auto& tensors = j.at("parameters");
  auto views = parameters(m);
  if (tensors.size() != views.size()) throw ParseError(0, "checkpoint: parameter list does not match the model kind");
  for (std::size_t k = 0; k < views.size(); ++k) {
    const auto& t = tensors[k];
    auto& v = views[k];
    if (t.at("name").get<std::string>() != v.name || t.at("rows").get<Eigen::Index>() != v.rows ||
        t.at("cols").get<Eigen::Index>() != v.cols)
      throw DimensionError("checkpoint: tensor '" + t.at("name").get<std::string>() + "' does not match '" +
                           std::string(v.name) + "'");
    const auto data = t.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != v.size())
      throw DimensionError("checkpoint: tensor '" + std::string(v.name) + "' has the wrong number of values");
    for (Eigen::Index r = 0; r < v.rows; ++r)
      for (Eigen::Index c = 0; c < v.cols; ++c) v.data[c * v.rows + r] = data[static_cast<std::size_t>(r * v.cols + c)];
  }
  if (meta) {
    meta->vocab_fingerprint = unhex(j.at("vocab_fingerprint").get<std::string>());
    meta->featurizer_fingerprint = unhex(j.at("featurizer_fingerprint").get<std::string>());
  }
  return m;
}

Model load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return checkpoint_from_json(s.str(), meta);
}

} // namespace threadlstm
