#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace threadlstm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Settings shared by the subcommands. A JSON file passed with --config
/// supplies any of these keys; flags given on the command line win.
struct RunConfig {
  std::string train_dir;
  std::string dev_dir;
  std::string input_dir;
  std::string out;
  std::string run_dir;
  std::string run_a;
  std::string run_b;
  std::string predictions;
  std::string embeddings;
  std::string mode = "graph_bi";
  bool text = true;
  bool pruning = true;
  std::vector<std::size_t> hidden_dims{16, 32, 64};
  std::size_t epochs = 20;
  std::size_t patience = 3;
  std::size_t embed_dim = 100;
  std::size_t min_count = 10;
  std::size_t batch_size = 1;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  double init_scale = 0.08;
  double rho = 0.95;
  double epsilon = 1e-6;
  double clip_norm = 5.0;
  double pruner_lambda = 1e-4;
  std::size_t pruner_epochs = 10;
  std::size_t threads = 100;
  std::vector<std::size_t> splits;
  std::string synth_config;
};

/// Runs one subcommand (args excludes the program name). Progress goes to
/// out, diagnostics to err. Returns 0 on success, 1 on runtime or model
/// errors and 2 on usage or configuration errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace threadlstm::cli
