#include <benchmark/benchmark.h>

#include "threadlstm/context_features.hpp"
#include "threadlstm/dataset.hpp"
#include "threadlstm/model.hpp"
#include "threadlstm/pruner.hpp"
#include "threadlstm/synthgen.hpp"
#include "threadlstm/training.hpp"

using namespace threadlstm;

namespace {

// One synthetic thread with roughly `nodes` comments.
ThreadExample example_with(std::size_t nodes) {
  Rng rng(nodes);
  return random_example(rng, nodes, 50, 0.3);
}

ThreadTree tree_with(std::size_t nodes) { return example_with(nodes).tree; }

Model model_for(ModelKind kind, std::size_t dh) {
  return Model::random(kind, ModelDims{dh, true, 100, 50}, 0.08, 1);
}

void BM_ExtractContext(benchmark::State& state) {
  const auto tree = tree_with(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_context(tree));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractContext)->Arg(20)->Arg(200)->Arg(2000);

void BM_Prune(benchmark::State& state) {
  const auto ex = example_with(static_cast<std::size_t>(state.range(0)));
  Rng rng(2);
  std::vector<bool> flags(ex.tree.size());
  for (std::size_t t = 1; t < flags.size(); ++t) flags[t] = rng.bernoulli(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(prune(ex.tree, flags));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Prune)->Arg(200)->Arg(2000);

void BM_Predict(benchmark::State& state) {
  const auto ex = example_with(static_cast<std::size_t>(state.range(0)));
  const auto m = model_for(static_cast<ModelKind>(state.range(2)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(predict_thread(m, ex));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Predict)
    ->ArgNames({"nodes", "dh", "kind"})
    ->ArgsProduct({{20, 200}, {16, 64}, {0, 1, 2}});

void BM_Gradients(benchmark::State& state) {
  const auto ex = example_with(static_cast<std::size_t>(state.range(0)));
  const auto m = model_for(ModelKind::GraphBidirectional, static_cast<std::size_t>(state.range(1)));
  Model grad = Model::zeros(m.kind, m.dims);
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_gradients(m, ex, grad));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gradients)->ArgNames({"nodes", "dh"})->ArgsProduct({{20, 200}, {16, 64}});

void BM_AdadeltaStep(benchmark::State& state) {
  Model m = model_for(ModelKind::GraphBidirectional, static_cast<std::size_t>(state.range(0)));
  const Model grad = Model::random(m.kind, m.dims, 1e-3, 2);
  AdadeltaState opt(m, 0.95, 1e-6);
  for (auto _ : state) opt.step(m, grad);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(parameter_count(m)));
}
BENCHMARK(BM_AdadeltaStep)->Arg(16)->Arg(64);

void BM_Generate(benchmark::State& state) {
  SynthConfig cfg;
  cfg.n_threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg));
}
BENCHMARK(BM_Generate)->Arg(100);

} // namespace
BENCHMARK_MAIN();
