// Serial reference vs OpenMP cell kernel for the rank-sweep evidence grid.
#include <benchmark/benchmark.h>

#include "rankev/experiments.hpp"

namespace {

rankev::ExperimentConfig bench_config(int seeds) {
  auto cfg = rankev::ExperimentConfig::defaults(rankev::Study::kRankSweep);
  cfg.seeds.resize(static_cast<std::size_t>(seeds));
  return cfg;
}

void BM_RegressionCells(benchmark::State& state, rankev::Execution exec) {
  const auto cfg = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto cells = rankev::compute_regression_cells(cfg, exec);
    benchmark::DoNotOptimize(cells.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(cfg.ranks.size() * cfg.seeds.size() * cfg.n_grid.size()));
}

void BM_DictCompare(benchmark::State& state, rankev::Execution exec) {
  auto cfg = rankev::ExperimentConfig::defaults(rankev::Study::kDictCompare);
  cfg.seeds.resize(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto result = rankev::run_dict_compare(cfg, exec);
    benchmark::DoNotOptimize(result.cells.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_RegressionCells, serial, rankev::Execution::kSerial)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RegressionCells, openmp, rankev::Execution::kParallel)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DictCompare, serial, rankev::Execution::kSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DictCompare, openmp, rankev::Execution::kParallel)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
