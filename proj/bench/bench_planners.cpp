// Serial vs OpenMP kernels: PRP candidate scan and sweep points.

#include <benchmark/benchmark.h>

#include "mvr/planners.hpp"
#include "mvr/sweep.hpp"
#include "mvr/workloads.hpp"

namespace {

mvr::ExecTree bench_tree(int versions) {
  mvr::SynthSpec spec;
  spec.kind = mvr::SynthKind::ci;
  spec.max_branch = 4;
  spec.max_depth = 10;
  spec.max_versions = versions;
  spec.seed = 7;
  return mvr::generate(spec);
}

void prp(benchmark::State& state, mvr::Execution exec) {
  const auto tree = bench_tree(static_cast<int>(state.range(0)));
  const mvr::Bytes budget = 2 * mvr::kGigabyte;
  for (auto _ : state) {
    auto sel = mvr::prp_select(tree, budget, mvr::PrpVariant::v1, exec);
    benchmark::DoNotOptimize(sel.cached.data());
  }
  state.counters["nodes"] = static_cast<double>(tree.size() - 1);
}

void sweep(benchmark::State& state, mvr::Execution exec) {
  const auto tree = bench_tree(static_cast<int>(state.range(0)));
  mvr::SweepSpec spec;
  spec.algorithms = {mvr::Algorithm::prp1, mvr::Algorithm::prp2, mvr::Algorithm::pc,
                     mvr::Algorithm::lfu};
  spec.budgets = mvr::budget_grid(4 * mvr::kGigabyte, 8);
  for (auto _ : state) {
    auto res = mvr::run_sweep(tree, spec, exec);
    benchmark::DoNotOptimize(res.rows.data());
  }
}

void BM_PrpSerial(benchmark::State& s) { prp(s, mvr::Execution::serial); }
void BM_PrpParallel(benchmark::State& s) { prp(s, mvr::Execution::parallel); }
void BM_SweepSerial(benchmark::State& s) { sweep(s, mvr::Execution::serial); }
void BM_SweepParallel(benchmark::State& s) { sweep(s, mvr::Execution::parallel); }

}  // namespace

BENCHMARK(BM_PrpSerial)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrpParallel)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
