#include <gtest/gtest.h>

#include "lgs/controller.hpp"
#include "lgs/errors.hpp"

using namespace lgs;
using namespace lgs::controller;

TEST(Sequences, OutgoingAndRetractionTables) {
  const auto& og = sequence_table(HandleState::hDown);
  const auto& rt = sequence_table(HandleState::hUp);
  EXPECT_EQ(og.front().name, "stmlt_general_EV");
  EXPECT_EQ(og.back().name, "stop_stmlt_general_EV");
  EXPECT_EQ(rt[2].name, "stmlt_gear_retraction");
  EXPECT_EQ(rt[2].valve, Valve::retract);
  // Each table switches every valve it touches on and then off again.
  for (const auto* t : {&og, &rt}) {
    OrderOutputs o;
    for (const auto& step : *t) set_valve(o, step.valve, step.value);
    EXPECT_EQ(o, OrderOutputs{});
  }
}

TEST(Sequences, ResumeTable) {
  EXPECT_EQ(resume_step(0).step, 1);
  EXPECT_EQ(resume_step(2).step, 2);
  EXPECT_TRUE(resume_step(4).cut_gear_valve);
  EXPECT_TRUE(resume_step(7).cut_close_valve);
  EXPECT_EQ(resume_step(8).step, 2);
  for (int i = 0; i <= kSequenceLength; ++i) {
    EXPECT_GE(resume_step(i).step, 1);
    EXPECT_LE(resume_step(i).step, 3);
  }
}

TEST(Merge, OrOfModulesAndAndUnderMutant) {
  KIndexedState k;
  k.k_orders[0].general_EV = true;
  k.k_orders[1].extend_EV = true;
  k.k_state_outputs[1].gears_locked_down = true;
  auto [o, so] = merge_outputs(k);
  EXPECT_TRUE(o.general_EV);
  EXPECT_TRUE(o.extend_EV);
  EXPECT_TRUE(so.gears_locked_down);
  EXPECT_EQ(so.greenLight, Light::lightON);

  SimConfig cfg;
  cfg.mutant = MutantId::SwapMergeToAND;
  auto [oa, soa] = merge_outputs(k, cfg);
  EXPECT_EQ(oa, OrderOutputs{});
  EXPECT_FALSE(soa.gears_locked_down);
}

TEST(Spawn, CopiesToBothModulesUnlessMutated) {
  SensedInputs in;
  in.handle.fill(HandleState::hUp);
  const auto k = spawn_inputs(in, KIndexedState{});
  EXPECT_EQ(k.k_inputs[0], in);
  EXPECT_EQ(k.k_inputs[1], in);
  SimConfig cfg;
  cfg.mutant = MutantId::SkipSpawn;
  const auto ks = spawn_inputs(in, KIndexedState{}, cfg);
  EXPECT_EQ(ks.k_inputs[0], in);
  EXPECT_EQ(ks.k_inputs[1], SensedInputs{});
}

TEST(Handle, UpFromGroundStartsRetraction) {
  const SystemState s0 = initial_state();
  const SystemState s = handle_event(HandleState::hUp, s0);
  EXPECT_EQ(s.internals.order, HandleState::hUp);
  EXPECT_EQ(s.internals.nextRTseq, 1);
  EXPECT_EQ(s.internals.nextOGseq, 0);
  EXPECT_FALSE(s.internals.endCycle);
  EXPECT_EQ(s.plant.analogical_switch, SwitchState::closedSW);
  EXPECT_TRUE(s.cursor.inputs_dirty);
  for (int m = 0; m < kModules; ++m) {
    EXPECT_EQ(s.kstate.k_nextRTseq[m], 1);
    EXPECT_FALSE(s.kstate.k_endCycle[m]);
  }
  EXPECT_THROW(handle_event(HandleState::hUp, s), NoOpHandleMove);
}

TEST(Handle, InversionMidGearTravelDropsGearValve) {
  SystemState s = handle_event(HandleState::hUp, initial_state());
  for (int m = 0; m < kModules; ++m) {
    s.kstate.k_nextRTseq[m] = 4;
    s.kstate.k_orders[m] = OrderOutputs{true, true, false, false, true};
  }
  s.internals.nextRTseq = 4;
  const auto n = handle_event(HandleState::hDown, s);
  EXPECT_EQ(n.internals.nextOGseq, 3);
  EXPECT_EQ(n.internals.nextRTseq, 0);
  for (int m = 0; m < kModules; ++m) {
    EXPECT_FALSE(n.kstate.k_orders[m].retract_EV);
    EXPECT_TRUE(n.kstate.k_orders[m].general_EV);
    EXPECT_EQ(n.kstate.k_nextOGseq[m], 3);
  }
}

TEST(Modules, FirstRetractionStepNeedsSpawnedHandle) {
  SystemState s = handle_event(HandleState::hUp, initial_state());
  const int first = kSequenceLength;  // rt_stmlt_general_EV
  EXPECT_FALSE(module_event_enabled(s, ModuleId(1), first));
  s.kstate = spawn_inputs(s.inputs, s.kstate);
  EXPECT_TRUE(module_event_enabled(s, ModuleId(1), first));
  EXPECT_TRUE(module_event_enabled(s, ModuleId(2), first));
  fire_module_event(s, ModuleId(1), first);
  EXPECT_TRUE(s.kstate.k_orders[0].general_EV);
  EXPECT_EQ(s.kstate.k_nextRTseq[0], 2);
  EXPECT_TRUE(s.cursor.outputs_dirty);
  // one step per module per macro-cycle
  EXPECT_FALSE(module_event_enabled(s, ModuleId(1), first + 1));
}

TEST(Modules, SilencedModuleHasNoOutputs) {
  SystemState s = initial_state();
  s.kstate.k_orders[1].general_EV = true;
  s = silence_module(s, ModuleId(2));
  EXPECT_TRUE(s.kstate.silent[1]);
  EXPECT_EQ(s.kstate.k_orders[1], OrderOutputs{});
}

TEST(Modules, EventNames) {
  EXPECT_EQ(module_event_name(0), "stmlt_general_EV");
  EXPECT_EQ(module_event_name(kSequenceLength), "rt_stmlt_general_EV");
  EXPECT_EQ(module_event_name(kMonAnomaly), "monitor_anomaly");
}
