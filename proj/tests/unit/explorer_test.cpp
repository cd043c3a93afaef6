#include <gtest/gtest.h>

#include "lgs/errors.hpp"
#include "lgs/explorer.hpp"

using namespace lgs;
using namespace lgs::explorer;
using monitor::Requirement;

namespace {

ExploreConfig base(std::uint32_t budget) {
  ExploreConfig c;
  c.pilot_moves_budget = budget;
  return c;
}

}  // namespace

TEST(Explorer, DepthZeroVisitsOnlyTheRoot) {
  auto c = base(2);
  c.max_depth = 0;
  const auto r = explore(c);
  EXPECT_EQ(r.states_visited, 1u);
  EXPECT_EQ(r.edges_fired, 0u);
  EXPECT_TRUE(r.violations.empty());
}

TEST(Explorer, NoPilotMovesFromGroundIsImmediatelyExhausted) {
  const auto r = explore(base(0));
  EXPECT_EQ(r.states_visited, 1u);
  EXPECT_TRUE(r.frontier_exhausted);
  EXPECT_FALSE(r.depth_cut);
}

TEST(Explorer, NominalBudgetTwoIsSafe) {
  const auto r = explore(base(2));
  EXPECT_TRUE(r.frontier_exhausted);
  EXPECT_FALSE(r.depth_cut);
  EXPECT_FALSE(r.budget_exceeded);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.incomplete_cycle_states, 0u);
  EXPECT_GT(r.completed_cycles_checked, 0u);
  EXPECT_GT(r.states_visited, 100u);
}

TEST(Explorer, DedupeDoesNotChangeVerdicts) {
  for (auto mutant : {std::optional<MutantId>{}, std::optional<MutantId>{MutantId::SwapMergeToAND}}) {
    auto c = base(1);
    c.max_depth = 9;
    c.sim.mutant = mutant;
    if (mutant) c.silent_module = ModuleId(2);
    auto d = c;
    d.dedupe = false;
    const auto a = explore(c);
    const auto b = explore(d);
    EXPECT_EQ(a.max_depth_reached, b.max_depth_reached);
    EXPECT_LE(a.states_visited, b.states_visited);
    ASSERT_EQ(a.violations.size(), b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
      EXPECT_EQ(a.violations[i].id, b.violations[i].id);
      EXPECT_EQ(a.violations[i].depth, b.violations[i].depth);
    }
  }
}

TEST(Explorer, WorkersDoNotChangeTheReport) {
  auto c = base(2);
  const auto a = explore(c);
  c.workers = 3;
  const auto b = explore(c);
  EXPECT_EQ(report_json(a, base(2)), report_json(b, base(2)));
}

TEST(Explorer, StateBudgetIsReported) {
  auto c = base(2);
  c.max_states = 50;
  const auto r = explore(c);
  EXPECT_TRUE(r.budget_exceeded);
  EXPECT_FALSE(r.frontier_exhausted);
}

TEST(Explorer, RejectsBadConfig) {
  auto c = base(1);
  c.workers = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = base(1);
  c.f_max = 2;  // with an empty envelope
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Mutants, DoorGuardIsCaughtAndMinimized) {
  auto c = base(2);  // extension needs the handle up and back down
  c.sim.mutant = MutantId::DropDoorGuardOnExtend;
  const auto r = explore(c);
  ASSERT_TRUE(r.has(Requirement::R31));
  const auto* cex = r.find(Requirement::R31);
  EXPECT_LE(cex->depth, 20u);
  const auto m = minimize(*cex);
  EXPECT_LE(m.events.size(), cex->events.size());
  ASSERT_TRUE(violation_index(m));
  EXPECT_EQ(*violation_index(m), m.events.size() - 1);
  // minimal: already a fixpoint
  EXPECT_EQ(minimize(m).events, m.events);
  // the trace replays
  const auto t = to_trace(m);
  EXPECT_TRUE(kernel::replay(t).ok);
}

TEST(Mutants, MinimizeStripsTrailingEvents) {
  auto c = base(2);  // extension needs the handle up and back down
  c.sim.mutant = MutantId::DropDoorGuardOnExtend;
  const auto r = explore(c);
  ASSERT_TRUE(r.has(Requirement::R31));
  auto cex = *r.find(Requirement::R31);
  // pad with a valid continuation: whatever the kernel would do next
  auto s = *kernel::replay_events(kernel::preset_state(cex.preset, cex.sim), cex.events, cex.sim);
  auto policy = kernel::ChoicePolicy::interactive();
  for (int i = 0; i < 5; ++i) {
    auto f = kernel::step(s, policy, cex.sim);
    if (!f) break;
    cex.events.push_back(f->event);
    s = f->state;
  }
  const auto m = minimize(cex);
  EXPECT_EQ(*violation_index(m), m.events.size() - 1);
}

TEST(Mutants, BrokenCounterexampleIsNotReproducible) {
  Counterexample c;
  c.id = Requirement::R31;
  c.events = {kernel::Event::handle(HandleState::hUp)};
  EXPECT_THROW(minimize(c), NotReproducible);
}

TEST(Mutants, AndMergeWithSilentModuleBreaksBinding) {
  auto c = base(1);
  c.sim.mutant = MutantId::SwapMergeToAND;
  c.silent_module = ModuleId(2);
  const auto r = explore(c);
  EXPECT_TRUE(r.has(Requirement::BIND));
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Mutants, SkippedSpawnBreaksInputBinding) {
  auto c = base(1);
  c.sim.mutant = MutantId::SkipSpawn;
  const auto r = explore(c);
  ASSERT_TRUE(r.has(Requirement::BIND));
  EXPECT_LE(r.find(Requirement::BIND)->depth, 3u);
}

TEST(Faults, SingleStuckChannelIsTolerated) {
  auto c = base(1);
  c.fault_envelope = {parse_fault("gear_extended:2:FG:StuckWrong")};
  c.f_max = 1;
  const auto r = explore(c);
  EXPECT_TRUE(r.frontier_exhausted);
  EXPECT_TRUE(r.violations.empty());
}
