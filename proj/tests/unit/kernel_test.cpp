#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "lgs/errors.hpp"
#include "lgs/kernel.hpp"

using namespace lgs;
using namespace lgs::kernel;

namespace {

Scenario outgoing_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.name = "k";
  sc.seed = seed;
  sc.script = {ScriptedAction{0, ActionKind::HandleUp, {}, {}},
               ScriptedAction{20, ActionKind::HandleDown, {}, {}}};
  return sc;
}

bool has_event(const SystemState& s, const std::string& name, const SimConfig& cfg) {
  const auto idx = find_event(name);
  if (!idx) return false;
  const auto en = enabled_events(s, s.cursor.phase, cfg);
  return std::find(en.begin(), en.end(), *idx) != en.end();
}

}  // namespace

TEST(Catalog, NamesAreUniqueAndFindable) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < catalog().size(); ++i) {
    const auto& e = catalog()[i];
    EXPECT_TRUE(names.insert(e.name).second) << e.name;
    EXPECT_EQ(find_event(e.name), static_cast<int>(i));
  }
  EXPECT_FALSE(find_event("no_such_event"));
  EXPECT_NE(catalog_version(), 0u);
}

TEST(Events, TextRoundTrip) {
  const std::vector<Event> events{Event::of(0), Event::of(static_cast<int>(catalog().size()) - 1),
                                  Event::handle(HandleState::hUp), Event::handle(HandleState::hDown),
                                  Event{Event::Kind::InjectFault, 0, parse_fault("handle:2:StuckTrue"), {}},
                                  Event{Event::Kind::ClearFaults, 0, {}, {}},
                                  Event{Event::Kind::SilenceModule, 0, {}, ModuleId(2)}};
  for (const auto& e : events) EXPECT_EQ(parse_event(to_string(e)), e) << to_string(e);
  EXPECT_THROW(parse_event("bogus_event"), TraceFormatError);
  EXPECT_THROW(parse_event("inject_fault(nonsense)"), TraceFormatError);
}

TEST(Kernel, InitialStateIsQuiescent) {
  const SimConfig cfg;
  const auto s = initial_state();
  EXPECT_TRUE(quiescent(s, cfg));
  EXPECT_TRUE(pilot_window(s, cfg));
  EXPECT_EQ(normalize(s, cfg), s);
  auto policy = ChoicePolicy::seeded(1);
  EXPECT_FALSE(step(s, policy, cfg));
}

TEST(Kernel, HandleUpLeadsToFirstRetractionStep) {
  const SimConfig cfg;
  SystemState s = fire(initial_state(), Event::handle(HandleState::hUp), cfg);
  EXPECT_EQ(s.internals.nextRTseq, 1);
  EXPECT_FALSE(quiescent(s, cfg));
  EXPECT_TRUE(pilot_window(s, cfg));  // environment events do not open a cycle
  ASSERT_TRUE(has_event(s, "spawn_inputs", cfg));
  s = fire(s, Event::of(*find_event("spawn_inputs")), cfg);
  EXPECT_TRUE(s.cursor.cycle_started);
  EXPECT_FALSE(pilot_window(s, cfg));
  EXPECT_TRUE(has_event(s, "k1.rt_stmlt_general_EV", cfg));
  EXPECT_TRUE(has_event(s, "k2.rt_stmlt_general_EV", cfg));
  EXPECT_FALSE(has_event(s, "k1.stmlt_general_EV", cfg));
}

TEST(Kernel, DisabledEventIsRejected) {
  const SimConfig cfg;
  EXPECT_THROW(fire(initial_state(), Event::of(*find_event("merge_outputs")), cfg), std::logic_error);
  EXPECT_THROW(fire(initial_state(), Event::handle(HandleState::hDown), cfg), NoOpHandleMove);
}

TEST(Kernel, AnomalyFreezesDecisions) {
  const SimConfig cfg;
  SystemState s = fire(initial_state(), Event::handle(HandleState::hUp), cfg);
  s = fire(s, Event::of(*find_event("spawn_inputs")), cfg);
  for (auto& so : s.kstate.k_state_outputs) so.anomaly = true;
  for (int i : enabled_events(s, Phase::Decision, cfg))
    EXPECT_NE(catalog()[i].kind, EventKind::Module) << catalog()[i].name;
}

TEST(Kernel, ClockStrictlyIncreasesAlongRuns) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run(outgoing_scenario(seed));
    ASSERT_FALSE(r.trace.records.empty());
    for (std::size_t i = 1; i < r.trace.records.size(); ++i)
      ASSERT_LT(r.trace.records[i - 1].llc, r.trace.records[i].llc);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.stop, StopReason::Quiescent);
    EXPECT_FALSE(r.incomplete_cycle);
    EXPECT_GE(r.cycle_verdicts.size(), 2u);
    for (const auto& v : r.cycle_verdicts) EXPECT_TRUE(v.holds);
  }
}

TEST(Kernel, SameSeedSameTrace) {
  const auto a = run(outgoing_scenario(42));
  const auto b = run(outgoing_scenario(42));
  EXPECT_EQ(write_trace(a.trace), write_trace(b.trace));
  EXPECT_EQ(a.final_state, b.final_state);
}

TEST(Kernel, ZeroStepBudgetIsRejected) {
  auto policy = ChoicePolicy::seeded(0);
  EXPECT_THROW(run(outgoing_scenario(0), policy, 0), std::invalid_argument);
}

TEST(Kernel, StepBudgetStopsRun) {
  auto policy = ChoicePolicy::seeded(3);
  const auto r = run(outgoing_scenario(3), policy, 10);
  EXPECT_EQ(r.stop, StopReason::MaxSteps);
  EXPECT_EQ(r.trace.records.size(), 10u);
}

TEST(Kernel, FirstPolicyIsCatalogOrder) {
  auto sc = outgoing_scenario(0);
  sc.policy = ScenarioPolicy::First;
  const auto a = run(sc);
  sc.seed = 99;  // irrelevant for the deterministic policy
  const auto b = run(sc);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.trace.records.size(), b.trace.records.size());
}

TEST(Replay, ReproducesRecordedRun) {
  const auto r = run(outgoing_scenario(5));
  const auto rep = replay(r.trace);
  EXPECT_TRUE(rep.ok) << rep.detail;
  EXPECT_EQ(rep.final_state, r.final_state);
}

TEST(Replay, EmptyTraceIsTrivial) {
  Trace t;
  t.header.catalog_version = catalog_version();
  const auto rep = replay(t);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.final_state, initial_state());
}

TEST(Replay, TamperedEventReportsItsStep) {
  auto t = run(outgoing_scenario(5)).trace;
  ASSERT_GT(t.records.size(), 12u);
  // replace a catalog event by a different one
  auto& rec = t.records[12];
  const std::string original = rec.event;
  rec.event = original == "merge_outputs" ? "spawn_inputs" : "merge_outputs";
  const auto rep = replay(t);
  EXPECT_FALSE(rep.ok);
  ASSERT_TRUE(rep.divergence_step);
  EXPECT_EQ(*rep.divergence_step, rec.step);
}

TEST(Replay, TamperedFingerprintReportsItsStep) {
  auto t = run(outgoing_scenario(5)).trace;
  t.records[7].fingerprint ^= 1;
  const auto rep = replay(t);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.divergence_step, t.records[7].step);
}

TEST(Replay, OtherCatalogIsRejected) {
  auto t = run(outgoing_scenario(5)).trace;
  t.header.catalog_version ^= 0xff;
  EXPECT_THROW(replay(t), CatalogMismatch);
}

TEST(Presets, KnownAndUnknown) {
  EXPECT_EQ(preset_state("stable_ground"), initial_state());
  const auto s = preset_state("post_hup");
  EXPECT_EQ(s.internals.order, HandleState::hUp);
  EXPECT_THROW(preset_state("flying"), Error);
}
