// Serial reference loops against their OpenMP counterparts. Arg 0 runs the
// serial loop; a positive arg runs parallel_for with that many threads.

#include <benchmark/benchmark.h>

#include "babagrid/evaluate.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/parallel.hpp"
#include "babagrid/verify.hpp"

using namespace babagrid;

namespace {

template <class Body>
void run_loop(int jobs, std::size_t n, Body&& body) {
  if (jobs == 0)
    serial_for(n, body);
  else
    parallel_for(n, jobs, body);
}

const std::vector<Sample>& step_batch() {
  static const auto samples = sample_states(SampleSpec{20000, {1, 2, 3, 4}, {1, 2, 3}}, GenParams{});
  return samples;
}

void BM_StepBatch(benchmark::State& state) {
  const auto& samples = step_batch();
  std::vector<StateHash> out(samples.size());
  for (auto _ : state) {
    run_loop(static_cast<int>(state.range(0)), samples.size(),
             [&](std::size_t i) { out[i] = hash_state(next_state(samples[i].state, samples[i].action).next); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples.size()));
}

void BM_GenerateLevels(benchmark::State& state) {
  GenParams p;
  std::vector<Level> out(60);
  for (auto _ : state) {
    run_loop(static_cast<int>(state.range(0)), out.size(),
             [&](std::size_t i) { out[i] = generate_level(1 + static_cast<int>(i % 3), 1000 + i, p); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * out.size()));
}

void BM_EvaluateSuite(benchmark::State& state) {
  SuiteSpec spec;
  spec.master_seed = 5;
  spec.parts = {{1, 15, false}, {2, 15, false}, {3, 15, false}};
  static const auto levels = generate_suite(spec, 1);
  EvalOptions opt;
  opt.jobs = state.range(0) == 0 ? 1 : static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_levels(levels, opt).tiers.size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * levels.size()));
}

void thread_args(benchmark::internal::Benchmark* b) {
  b->Arg(0);
  for (int t = 1; t <= default_jobs(); t *= 2) b->Arg(t);
  if (default_jobs() & (default_jobs() - 1)) b->Arg(default_jobs());
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_StepBatch)->Apply(thread_args);
BENCHMARK(BM_GenerateLevels)->Apply(thread_args);
BENCHMARK(BM_EvaluateSuite)->Apply(thread_args);

BENCHMARK_MAIN();
