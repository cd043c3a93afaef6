#include <benchmark/benchmark.h>

#include "lgs/controller.hpp"
#include "lgs/explorer.hpp"
#include "lgs/kernel.hpp"

using namespace lgs;

namespace {

Scenario retract_extend(std::uint64_t seed) {
  Scenario sc;
  sc.seed = seed;
  sc.script = {ScriptedAction{0, ActionKind::HandleUp, {}, {}},
               ScriptedAction{20, ActionKind::HandleDown, {}, {}}};
  return sc;
}

void BM_Vote3(benchmark::State& st) {
  std::uint8_t x = 0;
  for (auto _ : st) {
    auto r = controller::vote3(x & 1, (x >> 1) & 1, (x >> 2) & 1, {true, true, (x & 8) != 0});
    benchmark::DoNotOptimize(r);
    ++x;
  }
}
BENCHMARK(BM_Vote3);

void BM_Fingerprint(benchmark::State& st) {
  const auto s = kernel::preset_state("post_hup");
  for (auto _ : st) benchmark::DoNotOptimize(state_fingerprint(s));
}
BENCHMARK(BM_Fingerprint);

void BM_Step(benchmark::State& st) {
  const SimConfig cfg;
  const auto start = kernel::preset_state("post_hup");
  auto policy = kernel::ChoicePolicy::seeded(1);
  SystemState s = start;
  for (auto _ : st) {
    auto f = kernel::step(s, policy, cfg);
    s = f ? std::move(f->state) : start;
  }
}
BENCHMARK(BM_Step);

void BM_Run(benchmark::State& st) {
  kernel::RunOptions opts;
  opts.record_deltas = st.range(0) != 0;
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(kernel::run(retract_extend(++seed), opts));
}
BENCHMARK(BM_Run)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExploreBudget2(benchmark::State& st) {
  explorer::ExploreConfig cfg;
  cfg.workers = static_cast<unsigned>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(explorer::explore(cfg));
}
BENCHMARK(BM_ExploreBudget2)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
