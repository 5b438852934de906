#include "threadlstm/dataset.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "threadlstm/error.hpp"

namespace threadlstm {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

} // namespace

Featurizer Featurizer::fit(std::span<const ThreadTree> training, const FeaturizerConfig& config) {
  Featurizer f;
  std::vector<ContextFeatures> raw;
  std::vector<std::int64_t> karma;
  std::vector<std::string> texts;
  for (const auto& tree : training) {
    const auto ctx = extract_context(tree);
    for (NodeId t = 0; t < tree.size(); ++t) {
      texts.push_back(tree.record(t).text);
      if (t == tree.root()) continue;
      raw.push_back(ctx[t]);
      karma.push_back(tree.record(t).karma);
    }
  }
  if (raw.empty()) throw ConfigError("training split has no comments");
  f.standardizer = FeatureStandardizer::fit(raw);
  f.vocab = Vocabulary::build(texts, config.min_count);
  f.quantizer = KarmaQuantizer::fit(karma);
  if (config.use_pruning) {
    std::vector<ContextFeatures> standardized;
    standardized.reserve(raw.size());
    std::vector<bool> level0;
    level0.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      standardized.push_back(f.standardizer.apply(raw[i]));
      level0.push_back(f.quantizer.level(karma[i]) == 0);
    }
    f.pruner = train_pruner(standardized, level0, config.pruner);
  }
  return f;
}

ThreadExample Featurizer::prepare(ThreadTree tree) const {
  ThreadExample ex{std::move(tree), {}, {}, {}, {}, {}};
  const auto& t = ex.tree;
  ex.raw_context = extract_context(t);
  ex.context.reserve(t.size());
  for (const auto& raw : ex.raw_context) ex.context.push_back(standardizer.apply(raw));
  ex.tokens.reserve(t.size());
  ex.labels.reserve(t.size());
  for (NodeId n = 0; n < t.size(); ++n) {
    ex.tokens.push_back(vocab.encode(t.record(n).text));
    ex.labels.push_back(n == t.root() ? kNoLabel : quantizer.level(t.record(n).karma));
  }
  ex.pruned = pruner ? apply_pruner(t, *pruner, ex.context) : PrunedTree::identity(t);
  return ex;
}

std::vector<ThreadExample> Featurizer::prepare_all(std::vector<ThreadTree> trees) const {
  std::vector<ThreadExample> out;
  out.reserve(trees.size());
  for (auto& tree : trees) out.push_back(prepare(std::move(tree)));
  return out;
}

std::uint64_t Featurizer::fingerprint() const {
  std::uint64_t h = vocab.fingerprint();
  for (double v : standardizer.mean()) mix(h, bits(v));
  for (double v : standardizer.stddev()) mix(h, bits(v));
  for (auto v : quantizer.thresholds()) mix(h, static_cast<std::uint64_t>(v));
  mix(h, pruner ? 1 : 0);
  if (pruner) {
    for (double v : pruner->weights) mix(h, bits(v));
    mix(h, bits(pruner->bias));
  }
  return h;
}

void Featurizer::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::ordered_json s;
  s["mean"] = standardizer.mean();
  s["stddev"] = standardizer.stddev();
  write_file(fs::path(dir) / "standardizer.json", s.dump(2));
  write_file(fs::path(dir) / "quantizer.json", quantizer.to_json());
  std::ostringstream v;
  vocab.save(v);
  write_file(fs::path(dir) / "vocab.txt", v.str());
  const auto pruner_path = fs::path(dir) / "pruner.json";
  if (pruner)
    write_file(pruner_path, pruner->to_json());
  else
    fs::remove(pruner_path);
}

Featurizer Featurizer::load(const std::string& dir) {
  namespace fs = std::filesystem;
  Featurizer f;
  const auto s = nlohmann::json::parse(read_file(fs::path(dir) / "standardizer.json"));
  const auto mean = s.at("mean").get<std::vector<double>>();
  const auto stddev = s.at("stddev").get<std::vector<double>>();
  if (mean.size() != kContextDim || stddev.size() != kContextDim)
    throw DimensionError("standardizer.json: expected " + std::to_string(kContextDim) + " dimensions");
  ContextFeatures m, sd;
  std::copy(mean.begin(), mean.end(), m.begin());
  std::copy(stddev.begin(), stddev.end(), sd.begin());
  f.standardizer = FeatureStandardizer(m, sd);
  f.quantizer = KarmaQuantizer::from_json(read_file(fs::path(dir) / "quantizer.json"));
  std::istringstream v(read_file(fs::path(dir) / "vocab.txt"));
  f.vocab = Vocabulary::load(v);
  const auto pruner_path = fs::path(dir) / "pruner.json";
  if (fs::exists(pruner_path)) f.pruner = LinearPruneClassifier::from_json(read_file(pruner_path));
  return f;
}

std::vector<ThreadTree> load_corpus(const std::string& dir) {
  std::vector<ThreadTree> trees;
  for (const auto& path : list_thread_files(dir)) trees.push_back(read_thread_file(path));
  return trees;
}

} // namespace threadlstm
