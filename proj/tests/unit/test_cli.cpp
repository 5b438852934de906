#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "threadlstm/cli.hpp"
#include "threadlstm/dataset.hpp"
#include "threadlstm/model.hpp"
#include "threadlstm/training.hpp"

using namespace threadlstm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<nlohmann::json> jsonl(const fs::path& p) {
  std::vector<nlohmann::json> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

// A corpus and two trained runs shared by every test in this file.
class CliTest : public testing::Test {
protected:
  static fs::path root;

  static void SetUpTestSuite() {
    root = fs::path(testing::TempDir()) / "threadlstm_cli";
    fs::remove_all(root);
    ASSERT_EQ(cli_run({"gensynth", "--out", (root / "data").string(), "--splits", "40,12,12", "--seed", "3"}).code, 0);
    const auto bi = cli_run(train_args(root / "run_bi", "graph_bi"));
    ASSERT_EQ(bi.code, 0) << bi.err;
    const auto ff = cli_run(train_args(root / "run_ff", "node_indep"));
    ASSERT_EQ(ff.code, 0) << ff.err;
  }

  static std::vector<std::string> train_args(const fs::path& out, const std::string& mode) {
    return {"train", "--train", (root / "data/train").string(), "--dev", (root / "data/dev").string(),
            "--out", out.string(), "--mode", mode, "--hidden", "4", "--epochs", "2", "--embed-dim", "8",
            "--min-count", "2"};
  }

  static std::string data(const std::string& split) { return (root / "data" / split).string(); }
  static std::string path(const std::string& name) { return (root / name).string(); }
};

fs::path CliTest::root;

} // namespace

TEST_F(CliTest, ExitCodes) {
  auto r = cli_run({"train", "--train", "/nonexistent/dir", "--dev", data("dev"), "--out", path("x")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("train path not found: /nonexistent/dir"), std::string::npos) << r.err;
  EXPECT_EQ(cli_run({}).code, cli::kExitUsage);
  EXPECT_EQ(cli_run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(cli_run({"predict", "--run", path("run_bi"), "--bogus", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(cli_run({"train", "--mode", "lstm", "--train", data("train"), "--dev", data("dev"), "--out", path("x")}).code,
            cli::kExitUsage);
  const auto help = cli_run({"--help"});
  EXPECT_EQ(help.code, cli::kExitOk);
  EXPECT_NE(help.out.find("gensynth"), std::string::npos);

  std::ofstream(path("bad_config.json")) << R"({"epochs": 2, "learning_rate": 0.1})";
  r = cli_run({"train", "--config", path("bad_config.json"), "--train", data("train"), "--dev", data("dev"), "--out",
               path("x")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("learning_rate"), std::string::npos) << r.err;
}

TEST_F(CliTest, RunDirectoryContents) {
  for (const char* f : {"model.json", "train_log.csv", "config.json", "quantizer.json", "vocab.txt",
                        "standardizer.json", "pruner.json"})
    EXPECT_TRUE(fs::exists(root / "run_bi" / f)) << f;
  const auto ckpt = nlohmann::json::parse(slurp(root / "run_ff" / "model.json"));
  EXPECT_EQ(ckpt["kind"], "node_indep");
  EXPECT_EQ(nlohmann::json::parse(slurp(root / "run_bi" / "model.json"))["kind"], "graph_bi");
  const auto cfg = nlohmann::json::parse(slurp(root / "run_bi" / "config.json"));
  EXPECT_EQ(cfg["epochs"], 2);
  EXPECT_EQ(cfg["hidden_dims"], nlohmann::json::array({4}));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  std::ofstream(path("cfg.json")) << R"({"epochs": 1, "hidden_dims": [3], "min_count": 2, "embed_dim": 6})";
  const auto r = cli_run({"train", "--config", path("cfg.json"), "--hidden", "2", "--train", data("train"), "--dev",
                          data("dev"), "--out", path("run_cfg"), "--no-prune"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cfg = nlohmann::json::parse(slurp(root / "run_cfg" / "config.json"));
  EXPECT_EQ(cfg["epochs"], 1);
  EXPECT_EQ(cfg["hidden_dims"], nlohmann::json::array({2}));
  EXPECT_EQ(cfg["pruning"], false);
  EXPECT_FALSE(fs::exists(root / "run_cfg" / "pruner.json"));
  const auto prune = cli_run({"prune", "--run", path("run_cfg"), "--input", data("test"), "--out", path("p.csv")});
  EXPECT_EQ(prune.code, cli::kExitUsage);
}

TEST_F(CliTest, PredictRowsAndDeterminism) {
  ASSERT_EQ(cli_run({"predict", "--run", path("run_bi"), "--input", data("test"), "--out", path("pred1.jsonl")}).code, 0);
  ASSERT_EQ(cli_run({"predict", "--run", path("run_bi"), "--input", data("test"), "--out", path("pred2.jsonl"),
                     "--workers", "3"})
                .code,
            0);
  EXPECT_EQ(slurp(root / "pred1.jsonl"), slurp(root / "pred2.jsonl"));

  std::size_t comments = 0;
  for (const auto& t : load_corpus(data("test"))) comments += t.size() - 1;
  const auto rows = jsonl(root / "pred1.jsonl");
  ASSERT_EQ(rows.size(), comments);
  for (const auto& row : rows) {
    const auto p = row["probabilities"].get<std::vector<double>>();
    ASSERT_EQ(p.size(), 8u);
    double sum = 0.0;
    for (double v : p) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    if (row["pruned"].get<bool>()) EXPECT_EQ(row["level"], 0);
  }
  EXPECT_EQ(slurp(root / "pred1.jsonl").rfind("{\"thread_id\":", 0), 0u);
}

TEST_F(CliTest, EvaluateMatchesLibrary) {
  ASSERT_EQ(cli_run({"predict", "--run", path("run_bi"), "--input", data("test"), "--out", path("pred.jsonl")}).code, 0);
  const auto r = cli_run({"evaluate", "--predictions", path("pred.jsonl"), "--input", data("test"), "--run",
                          path("run_bi"), "--out", path("eval")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(root / "eval" / "report.json"));

  const auto fz = Featurizer::load(path("run_bi"));
  const auto model = load_checkpoint((root / "run_bi" / "model.json").string());
  const auto examples = fz.prepare_all(load_corpus(data("test")));
  const auto api = evaluate(score_comments(model, examples));
  EXPECT_EQ(report["macro_f1"].get<double>(), api.macro);
  EXPECT_EQ(report["weighted_f1"].get<double>(), api.weighted);
  EXPECT_EQ(report["n_pruned"].get<std::size_t>(), api.n_pruned);

  const std::string buckets = slurp(root / "eval" / "time_buckets.csv");
  EXPECT_EQ(static_cast<std::size_t>(std::count(buckets.begin(), buckets.end(), '\n')), api.time_buckets.size() + 1);
  EXPECT_EQ(slurp(root / "eval" / "confusion.csv"), api.confusion_csv());
}

TEST_F(CliTest, EvaluatePerfectAndMismatched) {
  // The training split holds every level, since the quantizer was fit on it.
  const auto fz = Featurizer::load(path("run_bi"));
  std::set<std::size_t> levels;
  {
    std::ofstream out(path("perfect.jsonl"));
    for (const auto& tree : load_corpus(data("train")))
      for (NodeId t = 1; t < tree.size(); ++t) {
        const auto level = fz.quantizer.level(tree.record(t).karma);
        levels.insert(level);
        nlohmann::ordered_json row{
            {"thread_id", tree.record(0).id}, {"id", tree.record(t).id}, {"level", level}, {"pruned", false}};
        out << row.dump() << '\n';
      }
  }
  ASSERT_EQ(levels.size(), 8u);
  ASSERT_EQ(cli_run({"evaluate", "--predictions", path("perfect.jsonl"), "--input", data("train"), "--run",
                     path("run_bi"), "--out", path("eval_perfect")})
                .code,
            0);
  const auto report = nlohmann::json::parse(slurp(root / "eval_perfect" / "report.json"));
  EXPECT_EQ(report["macro_f1"].get<double>(), 1.0);
  EXPECT_EQ(report["weighted_f1"].get<double>(), 1.0);

  const auto r = cli_run({"evaluate", "--predictions", path("perfect.jsonl"), "--input", data("dev"), "--run",
                          path("run_bi"), "--out", path("eval_wrong")});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("no prediction for"), std::string::npos) << r.err;
}

TEST_F(CliTest, PruneReport) {
  const auto r = cli_run({"prune", "--run", path("run_bi"), "--input", data("test"), "--out", path("prune.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(root / "prune.csv");
  EXPECT_EQ(csv.rfind("thread_id,n_total,n_pruned,fraction\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 13u);
}

TEST_F(CliTest, GensynthReproducible) {
  ASSERT_EQ(cli_run({"gensynth", "--out", path("g1"), "--threads", "5", "--seed", "9"}).code, 0);
  ASSERT_EQ(cli_run({"gensynth", "--out", path("g2"), "--threads", "5", "--seed", "9"}).code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "g1")) {
    EXPECT_EQ(slurp(e.path()), slurp(root / "g2" / e.path().filename()));
    files += e.path().extension() == ".jsonl";
  }
  EXPECT_EQ(files, 5u);
  EXPECT_EQ(nlohmann::json::parse(slurp(root / "g1" / "synth_config.json"))["seed"], 9);

  ASSERT_EQ(cli_run({"gensynth", "--out", path("g0"), "--threads", "0"}).code, 0);
  EXPECT_TRUE(load_corpus(path("g0")).empty());
  EXPECT_EQ(cli_run({"gensynth", "--out", path("g4"), "--splits", "1,1,1,1"}).code, cli::kExitUsage);
}

TEST_F(CliTest, Gradcheck) {
  const auto r = cli_run({"gradcheck", "--trials", "6"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("PASS"), std::string::npos) << r.out;
  const auto bad = cli_run({"gradcheck", "--trials", "0"});
  EXPECT_EQ(bad.code, cli::kExitUsage);
}

TEST_F(CliTest, InterpolationRun) {
  const auto r = cli_run({"train", "--mode", "interp", "--run-a", path("run_bi"), "--run-b", path("run_ff"), "--dev",
                          data("dev"), "--out", path("run_interp")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(root / "run_interp" / "interp.json"));
  const double alpha = j["alpha"].get<double>();
  EXPECT_GE(alpha, 0.0);
  EXPECT_LE(alpha, 1.0);
  ASSERT_EQ(cli_run({"predict", "--run", path("run_interp"), "--input", data("test"), "--out", path("pi.jsonl")}).code,
            0);
  const auto rows = jsonl(root / "pi.jsonl");
  EXPECT_FALSE(rows.empty());
  EXPECT_EQ(cli_run({"evaluate", "--predictions", path("pi.jsonl"), "--input", data("test"), "--run",
                     path("run_interp"), "--out", path("eval_interp")})
                .code,
            0);
  EXPECT_EQ(cli_run({"train", "--mode", "interp", "--run-a", path("run_bi"), "--dev", data("dev"), "--out",
                     path("run_interp2")})
                .code,
            cli::kExitUsage);
}

TEST_F(CliTest, FingerprintMismatchIsRuntimeError) {
  fs::copy(root / "run_bi", root / "run_tampered", fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  fs::copy_file(root / "run_ff" / "quantizer.json", root / "run_tampered" / "quantizer.json",
                fs::copy_options::overwrite_existing);
  std::ofstream(root / "run_tampered" / "vocab.txt", std::ios::app) << "zzzextra 99\n";
  const auto r = cli_run({"predict", "--run", path("run_tampered"), "--input", data("test"), "--out", path("t.jsonl")});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("fingerprint"), std::string::npos) << r.err;
}
