#include "threadlstm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "threadlstm/baseline_ffnn.hpp"
#include "threadlstm/dataset.hpp"
#include "threadlstm/error.hpp"
#include "threadlstm/model.hpp"
#include "threadlstm/synthgen.hpp"
#include "threadlstm/training.hpp"

namespace threadlstm::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_dir(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " path not given");
  if (!fs::is_directory(path)) throw UsageError(what + " path not found: " + path);
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " path not given");
  if (!fs::is_regular_file(path)) throw UsageError(what + " path not found: " + path);
}

void require_out(const std::string& path) {
  if (path.empty()) throw UsageError("--out is required");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

// Flags bound to RunConfig members. Values come from the defaults, then the
// JSON config file, then whatever was given on the command line.
class Bindings {
public:
  Bindings(CLI::App& app, RunConfig& parsed) : app_(app), parsed_(parsed) {}

  template <typename T>
  CLI::Option* option(const std::string& flags, T RunConfig::*member, const std::string& key,
                      const std::string& help) {
    auto* opt = app_.add_option(flags, parsed_.*member, help);
    remember(opt, member, key);
    return opt;
  }

  CLI::Option* flag(const std::string& flags, bool RunConfig::*member, const std::string& key,
                    const std::string& help) {
    auto* opt = app_.add_flag(flags, parsed_.*member, help);
    remember(opt, member, key);
    return opt;
  }

  RunConfig resolve(const std::string& config_path) const {
    RunConfig cfg;
    if (!config_path.empty()) {
      require_file(config_path, "config");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(config_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config " + config_path + ": " + e.what());
      }
      if (!j.is_object()) throw UsageError("config " + config_path + ": expected a JSON object");
      for (const auto& [key, value] : j.items()) {
        auto it = std::find_if(bound_.begin(), bound_.end(), [&](const Bound& b) { return b.key == key; });
        if (it == bound_.end()) throw UsageError("config " + config_path + ": unknown key '" + key + "'");
        try {
          it->from_json(cfg, value);
        } catch (const nlohmann::json::exception& e) {
          throw UsageError("config " + config_path + ": key '" + key + "': " + e.what());
        }
      }
    }
    for (const auto& b : bound_)
      if (b.opt->count() > 0) b.from_cli(cfg, parsed_);
    return cfg;
  }

private:
  struct Bound {
    CLI::Option* opt;
    std::string key;
    std::function<void(RunConfig&, const RunConfig&)> from_cli;
    std::function<void(RunConfig&, const nlohmann::json&)> from_json;
  };

  template <typename T>
  void remember(CLI::Option* opt, T RunConfig::*member, const std::string& key) {
    bound_.push_back({opt, key, [member](RunConfig& to, const RunConfig& from) { to.*member = from.*member; },
                      [member](RunConfig& to, const nlohmann::json& v) { to.*member = v.get<T>(); }});
  }

  CLI::App& app_;
  RunConfig& parsed_;
  std::vector<Bound> bound_;
};

ojson config_json(const RunConfig& c) {
  ojson j;
  j["mode"] = c.mode;
  j["text"] = c.text;
  j["pruning"] = c.pruning;
  j["hidden_dims"] = c.hidden_dims;
  j["epochs"] = c.epochs;
  j["patience"] = c.patience;
  j["embed_dim"] = c.embed_dim;
  j["min_count"] = c.min_count;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["init_scale"] = c.init_scale;
  j["rho"] = c.rho;
  j["epsilon"] = c.epsilon;
  j["clip_norm"] = c.clip_norm;
  j["pruner_lambda"] = c.pruner_lambda;
  j["pruner_epochs"] = c.pruner_epochs;
  if (!c.embeddings.empty()) j["embeddings"] = c.embeddings;
  return j;
}

template <typename F>
void parallel_over(std::size_t n, std::size_t workers, F&& f) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// A trained run directory: preprocessing plus checkpoint, or an
// interpolation of two such runs.
struct Run {
  Featurizer featurizer;
  Model model;
};

Run load_run(const fs::path& dir) {
  require_dir(dir.string(), "run");
  const auto ckpt = dir / "model.json";
  if (!fs::is_regular_file(ckpt)) throw UsageError("run " + dir.string() + " has no model.json");
  Run r;
  r.featurizer = Featurizer::load(dir.string());
  CheckpointMeta meta;
  r.model = load_checkpoint(ckpt.string(), &meta);
  if (meta.vocab_fingerprint != r.featurizer.vocab.fingerprint() ||
      meta.featurizer_fingerprint != r.featurizer.fingerprint())
    throw Error("checkpoint in " + dir.string() + " does not match its preprocessing (fingerprint mismatch)");
  return r;
}

struct Predictor {
  std::vector<Run> runs;
  double alpha = 1.0;

  static Predictor load(const fs::path& dir) {
    Predictor p;
    const auto interp = dir / "interp.json";
    if (fs::is_regular_file(interp)) {
      nlohmann::json j = nlohmann::json::parse(read_text(interp));
      p.runs.push_back(load_run(j.at("run_a").get<std::string>()));
      p.runs.push_back(load_run(j.at("run_b").get<std::string>()));
      p.alpha = j.at("alpha").get<double>();
    } else {
      p.runs.push_back(load_run(dir));
    }
    return p;
  }

  const KarmaQuantizer& quantizer() const { return runs.front().featurizer.quantizer; }

  std::vector<NodePrediction> thread(const ThreadTree& tree) const {
    auto a = predict_thread(runs[0].model, runs[0].featurizer.prepare(tree));
    if (runs.size() == 1) return a;
    const auto b = predict_thread(runs[1].model, runs[1].featurizer.prepare(tree));
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i].probabilities = interpolate(a[i].probabilities, b[i].probabilities, alpha);
      a[i].level = argmax_level(a[i].probabilities);
      a[i].pruned = a[i].pruned && b[i].pruned;
    }
    return a;
  }
};

TrainConfig train_config(const RunConfig& c) {
  TrainConfig tc;
  tc.kind = parse_model_kind(c.mode);
  tc.hidden_dims = c.hidden_dims;
  tc.max_epochs = c.epochs;
  tc.patience = c.patience;
  tc.seed = c.seed;
  tc.rho = c.rho;
  tc.epsilon = c.epsilon;
  tc.init_scale = c.init_scale;
  tc.use_text = c.text;
  tc.embed_dim = c.embed_dim;
  tc.clip_norm = c.clip_norm;
  tc.batch_size = c.batch_size;
  tc.workers = c.workers;
  tc.validate();
  return tc;
}

int cmd_train_interp(const RunConfig& c, std::ostream& out) {
  if (c.run_a.empty() || c.run_b.empty()) throw UsageError("--mode interp needs --run-a and --run-b");
  require_dir(c.dev_dir, "dev");
  require_out(c.out);
  const Run a = load_run(c.run_a), b = load_run(c.run_b);
  auto dev = load_corpus(c.dev_dir);
  const auto dev_a = a.featurizer.prepare_all(dev);
  const auto dev_b = b.featurizer.prepare_all(std::move(dev));
  const auto pa = predict_distributions(a.model, dev_a, c.workers);
  const auto pb = predict_distributions(b.model, dev_b, c.workers);
  const auto sa = score_comments(a.model, dev_a, c.workers);
  const auto sb = score_comments(b.model, dev_b, c.workers);
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i].label != sb[i].label) throw ConfigError("interp: runs disagree on karma levels; fit them on the same training split");
    labels.push_back(sa[i].label);
  }
  const double alpha = tune_alpha(pa, pb, labels);
  std::vector<std::size_t> predicted;
  for (std::size_t i = 0; i < pa.size(); ++i) predicted.push_back(argmax_level(interpolate(pa[i], pb[i], alpha)));

  ojson j;
  j["mode"] = "interp";
  j["run_a"] = fs::absolute(c.run_a).lexically_normal().string();
  j["run_b"] = fs::absolute(c.run_b).lexically_normal().string();
  j["alpha"] = alpha;
  j["dev_macro_f1"] = macro_f1(labels, predicted);
  j["dev_weighted_f1"] = weighted_f1(labels, predicted);
  write_text(fs::path(c.out) / "interp.json", j.dump(2) + "\n");
  out << "alpha " << alpha << "  dev weighted F1 " << weighted_f1(labels, predicted) << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  if (c.mode == "interp") return cmd_train_interp(c, out);
  const TrainConfig tc = train_config(c);
  require_dir(c.train_dir, "train");
  require_dir(c.dev_dir, "dev");
  require_out(c.out);
  if (!c.embeddings.empty()) require_file(c.embeddings, "embeddings");

  auto train_trees = load_corpus(c.train_dir);
  auto dev_trees = load_corpus(c.dev_dir);
  if (train_trees.empty()) throw ConfigError("train split " + c.train_dir + " has no threads");
  if (dev_trees.empty()) throw ConfigError("dev split " + c.dev_dir + " has no threads");

  FeaturizerConfig fc;
  fc.min_count = c.min_count;
  fc.use_pruning = c.pruning;
  fc.pruner.lambda = c.pruner_lambda;
  fc.pruner.epochs = c.pruner_epochs;
  fc.pruner.seed = c.seed;
  const Featurizer f = Featurizer::fit(train_trees, fc);
  const auto train_set = f.prepare_all(std::move(train_trees));
  const auto dev_set = f.prepare_all(std::move(dev_trees));

  std::size_t comments = 0, pruned = 0;
  for (const auto& ex : train_set) {
    comments += ex.tree.size() - 1;
    pruned += ex.pruned.pruned_count();
  }
  out << "train threads " << train_set.size() << ", comments " << comments << ", pruned " << pruned
      << "; vocab " << f.vocab.size() << "\n";

  std::optional<EmbeddingTable> pretrained;
  if (!c.embeddings.empty() && c.text)
    pretrained = load_pretrained(c.embeddings, f.vocab, c.embed_dim, c.init_scale, c.seed);

  const auto result = train(train_set, dev_set, tc, f.vocab.size(), pretrained ? &*pretrained : nullptr,
                            [&](const EpochLog& e) {
                              out << "dh " << e.hidden_dim << " epoch " << e.epoch << "  loss " << e.train_loss
                                  << "  dev macro " << e.dev_macro_f1 << "  weighted " << e.dev_weighted_f1
                                  << "\n";
                              out.flush();
                            });

  const fs::path dir(c.out);
  fs::create_directories(dir);
  f.save(dir.string());
  save_checkpoint(result.model, {f.vocab.fingerprint(), f.fingerprint()}, (dir / "model.json").string());
  write_text(dir / "train_log.csv", result.log_csv());
  write_text(dir / "config.json", config_json(c).dump(2) + "\n");
  out << "best dh " << result.best_hidden_dim << " epoch " << result.best_epoch << "  dev weighted F1 "
      << result.best_dev_weighted_f1 << "\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& c, std::ostream& out) {
  require_dir(c.run_dir, "run");
  require_dir(c.input_dir, "input");
  require_out(c.out);
  const Predictor predictor = Predictor::load(c.run_dir);
  const auto trees = load_corpus(c.input_dir);

  std::vector<std::string> lines(trees.size());
  parallel_over(trees.size(), c.workers, [&](std::size_t i) {
    std::string text;
    const auto& tree = trees[i];
    const auto& thread_id = tree.record(tree.root()).id;
    for (const auto& p : predictor.thread(tree)) {
      ojson row;
      row["thread_id"] = thread_id;
      row["id"] = tree.record(p.node).id;
      row["probabilities"] = p.probabilities;
      row["level"] = p.pruned ? std::size_t{0} : p.level;
      row["pruned"] = p.pruned;
      text += row.dump() + "\n";
    }
    lines[i] = std::move(text);
  });

  std::string all;
  std::size_t rows = 0;
  for (const auto& l : lines) {
    all += l;
    rows += static_cast<std::size_t>(std::count(l.begin(), l.end(), '\n'));
  }
  write_text(c.out, all);
  out << "wrote " << rows << " predictions for " << trees.size() << " threads to " << c.out << "\n";
  return kExitOk;
}

struct PredictionRow {
  std::size_t level = 0;
  bool pruned = false;
  bool used = false;
};

std::string id_list(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) s += (i ? ", " : "") + ids[i];
  if (ids.size() > 10) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  require_file(c.predictions, "predictions");
  require_dir(c.input_dir, "input");
  require_dir(c.run_dir, "run");
  require_out(c.out);

  KarmaQuantizer quantizer;
  {
    fs::path run(c.run_dir);
    if (fs::is_regular_file(run / "interp.json"))
      run = nlohmann::json::parse(read_text(run / "interp.json")).at("run_a").get<std::string>();
    quantizer = KarmaQuantizer::from_json(read_text(run / "quantizer.json"));
  }

  std::map<std::pair<std::string, std::string>, PredictionRow> rows;
  {
    std::ifstream in(c.predictions);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
        PredictionRow r;
        r.level = j.at("level").get<std::size_t>();
        r.pruned = j.at("pruned").get<bool>();
        auto key = std::make_pair(j.at("thread_id").get<std::string>(), j.at("id").get<std::string>());
        if (!rows.emplace(key, r).second) throw ParseError(n, "duplicate prediction for '" + key.second + "'");
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(n, c.predictions + ": " + e.what());
      }
    }
  }

  std::vector<ScoredComment> scored;
  std::vector<std::string> missing;
  for (const auto& tree : load_corpus(c.input_dir)) {
    const auto& thread_id = tree.record(tree.root()).id;
    const auto context = extract_context(tree);
    for (auto t : tree.forward_order()) {
      if (t == tree.root()) continue;
      const auto& rec = tree.record(t);
      auto it = rows.find({thread_id, rec.id});
      if (it == rows.end()) {
        missing.push_back(rec.id);
        continue;
      }
      it->second.used = true;
      ScoredComment s;
      s.thread_id = thread_id;
      s.comment_id = rec.id;
      s.label = quantizer.level(rec.karma);
      s.pruned = it->second.pruned;
      s.predicted = s.pruned ? 0 : it->second.level;
      s.n_previous = static_cast<std::size_t>(context[t][kPreviousComments]);
      scored.push_back(std::move(s));
    }
  }
  std::vector<std::string> unknown;
  for (const auto& [key, r] : rows)
    if (!r.used) unknown.push_back(key.second);
  if (!missing.empty()) throw Error("no prediction for " + std::to_string(missing.size()) + " comments: " + id_list(missing));
  if (!unknown.empty())
    throw Error(std::to_string(unknown.size()) + " predictions match no comment in " + c.input_dir + ": " +
                id_list(unknown));

  const auto report = evaluate(scored);
  const fs::path dir(c.out);
  write_text(dir / "report.json", report.to_json() + "\n");
  write_text(dir / "confusion.csv", report.confusion_csv());
  write_text(dir / "time_buckets.csv", report.time_buckets_csv());
  out << "comments " << report.n_scored << " (pruned " << report.n_pruned << ")  macro F1 " << report.macro
      << "  weighted F1 " << report.weighted << "\n";
  return kExitOk;
}

int cmd_prune(const RunConfig& c, std::ostream& out) {
  require_dir(c.run_dir, "run");
  require_dir(c.input_dir, "input");
  require_out(c.out);
  const Featurizer f = Featurizer::load(c.run_dir);
  if (!f.pruner) throw ConfigError("run " + c.run_dir + " was trained without pruning");
  std::ostringstream csv;
  csv << "thread_id,n_total,n_pruned,fraction\n";
  std::size_t total = 0, pruned = 0;
  for (auto& tree : load_corpus(c.input_dir)) {
    const auto ex = f.prepare(std::move(tree));
    const std::size_t n = ex.tree.size() - 1, k = ex.pruned.pruned_count();
    csv << ex.thread_id() << ',' << n << ',' << k << ',' << pruned_fraction(ex.pruned) << '\n';
    total += n;
    pruned += k;
  }
  write_text(c.out, csv.str());
  out << "pruned " << pruned << " of " << total << " comments";
  if (total > 0) out << " (" << static_cast<double>(pruned) / static_cast<double>(total) << ")";
  out << "\n";
  return kExitOk;
}

void write_split(const std::vector<ThreadTree>& trees, std::size_t first, std::size_t last, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = first; i < last; ++i)
    write_thread_file(trees[i], (dir / (trees[i].record(trees[i].root()).id + ".jsonl")).string());
}

int cmd_gensynth(const RunConfig& c, std::ostream& out) {
  require_out(c.out);
  SynthConfig sc;
  if (!c.synth_config.empty()) {
    require_file(c.synth_config, "synth config");
    sc = SynthConfig::from_json(read_text(c.synth_config));
  }
  sc.seed = c.seed;
  std::size_t total = c.threads;
  if (!c.splits.empty()) {
    if (c.splits.size() > 3) throw UsageError("--splits takes at most three sizes (train, dev, test)");
    total = 0;
    for (auto s : c.splits) total += s;
  }
  sc.n_threads = total;
  sc.validate();
  const auto trees = generate(sc);
  if (c.splits.empty()) {
    write_split(trees, 0, trees.size(), c.out);
  } else {
    static constexpr const char* kNames[] = {"train", "dev", "test"};
    std::size_t first = 0;
    for (std::size_t k = 0; k < c.splits.size(); ++k) {
      write_split(trees, first, first + c.splits[k], fs::path(c.out) / kNames[k]);
      first += c.splits[k];
    }
  }
  write_text(fs::path(c.out) / "synth_config.json", sc.to_json() + "\n");
  out << "generated " << trees.size() << " threads in " << c.out << "\n";
  return kExitOk;
}

int cmd_gradcheck(const GradcheckConfig& gc, std::ostream& out) {
  const auto report = gradcheck(gc);
  out << report.to_text();
  return report.passed() ? kExitOk : kExitRuntime;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-structured LSTM models of threaded discussions"};
  app.name("threadlstm");
  app.require_subcommand(1);

  RunConfig parsed;
  std::map<CLI::App*, std::unique_ptr<Bindings>> bindings;
  std::map<CLI::App*, std::string> config_paths;
  auto subcommand = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    bindings[sub] = std::make_unique<Bindings>(*sub, parsed);
    sub->add_option("--config", config_paths[sub], "JSON file with default settings");
    return sub;
  };
  auto common_workers = [&](CLI::App* sub) {
    bindings[sub]->option("--workers", &RunConfig::workers, "workers", "worker threads")
        ->check(CLI::PositiveNumber);
  };

  auto* train = subcommand("train", "fit preprocessing and train a model");
  {
    auto& b = *bindings[train];
    b.option("--train", &RunConfig::train_dir, "train", "directory of training threads");
    b.option("--dev", &RunConfig::dev_dir, "dev", "directory of development threads");
    b.option("--out,-o", &RunConfig::out, "out", "run directory to write");
    b.option("--mode", &RunConfig::mode, "mode", "graph_bi, graph_fwd, node_indep or interp")
        ->check(CLI::IsMember({"graph_bi", "graph_fwd", "node_indep", "interp"}));
    b.option("--run-a", &RunConfig::run_a, "run_a", "first run for interp");
    b.option("--run-b", &RunConfig::run_b, "run_b", "second run for interp");
    b.flag("--text,!--no-text", &RunConfig::text, "text", "use bag-of-words text features");
    b.flag("--prune,!--no-prune", &RunConfig::pruning, "pruning", "train and apply the pruning classifier");
    b.option("--hidden", &RunConfig::hidden_dims, "hidden_dims", "hidden sizes to try")->delimiter(',');
    b.option("--epochs", &RunConfig::epochs, "epochs", "maximum epochs per hidden size");
    b.option("--patience", &RunConfig::patience, "patience", "epochs without dev improvement before stopping");
    b.option("--embed-dim", &RunConfig::embed_dim, "embed_dim", "word embedding size");
    b.option("--embeddings", &RunConfig::embeddings, "embeddings", "pretrained embeddings (token v1 ... vd)");
    b.option("--min-count", &RunConfig::min_count, "min_count", "minimum token frequency for the vocabulary");
    b.option("--batch-size", &RunConfig::batch_size, "batch_size", "threads per update");
    b.option("--seed", &RunConfig::seed, "seed", "random seed");
    b.option("--init-scale", &RunConfig::init_scale, "init_scale", "uniform initialization range");
    b.option("--rho", &RunConfig::rho, "rho", "adadelta decay");
    b.option("--epsilon", &RunConfig::epsilon, "epsilon", "adadelta epsilon");
    b.option("--clip-norm", &RunConfig::clip_norm, "clip_norm", "global gradient norm limit (0 disables)");
    b.option("--pruner-lambda", &RunConfig::pruner_lambda, "pruner_lambda", "pruning classifier regularization");
    b.option("--pruner-epochs", &RunConfig::pruner_epochs, "pruner_epochs", "pruning classifier epochs");
    common_workers(train);
  }

  auto* predict = subcommand("predict", "write per-comment level distributions");
  {
    auto& b = *bindings[predict];
    b.option("--run", &RunConfig::run_dir, "run", "run directory from train");
    b.option("--input", &RunConfig::input_dir, "input", "directory of threads");
    b.option("--out,-o", &RunConfig::out, "out", "predictions JSONL file");
    common_workers(predict);
  }

  auto* eval = subcommand("evaluate", "score predictions against labeled threads");
  {
    auto& b = *bindings[eval];
    b.option("--predictions", &RunConfig::predictions, "predictions", "predictions JSONL file");
    b.option("--input", &RunConfig::input_dir, "input", "directory of labeled threads");
    b.option("--run", &RunConfig::run_dir, "run", "run directory holding the karma quantizer");
    b.option("--out,-o", &RunConfig::out, "out", "report directory");
  }

  auto* prune = subcommand("prune", "report how much of each thread the pruner removes");
  {
    auto& b = *bindings[prune];
    b.option("--run", &RunConfig::run_dir, "run", "run directory with a pruning classifier");
    b.option("--input", &RunConfig::input_dir, "input", "directory of threads");
    b.option("--out,-o", &RunConfig::out, "out", "CSV report");
  }

  auto* synth = subcommand("gensynth", "generate a synthetic corpus");
  {
    auto& b = *bindings[synth];
    b.option("--out,-o", &RunConfig::out, "out", "output directory");
    b.option("--threads", &RunConfig::threads, "threads", "number of threads");
    b.option("--splits", &RunConfig::splits, "splits", "train,dev,test sizes (overrides --threads)")
        ->delimiter(',');
    b.option("--seed", &RunConfig::seed, "seed", "random seed");
    b.option("--synth-config", &RunConfig::synth_config, "synth_config", "generator parameters (JSON)");
  }

  GradcheckConfig gc;
  auto* grad = app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
  grad->add_option("--trials", gc.trials, "random configurations")->check(CLI::PositiveNumber);
  grad->add_option("--seed", gc.seed, "random seed");
  grad->add_option("--step", gc.step, "finite-difference step");
  grad->add_option("--tolerance", gc.tolerance, "maximum relative error");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (app.get_subcommands().empty()) err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (grad->parsed()) return cmd_gradcheck(gc, out);
    for (auto& [sub, b] : bindings) {
      if (!sub->parsed()) continue;
      const RunConfig cfg = b->resolve(config_paths[sub]);
      if (sub == train) return cmd_train(cfg, out);
      if (sub == predict) return cmd_predict(cfg, out);
      if (sub == eval) return cmd_evaluate(cfg, out);
      if (sub == prune) return cmd_prune(cfg, out);
      if (sub == synth) return cmd_gensynth(cfg, out);
    }
    err << "error: no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

} // namespace threadlstm::cli
