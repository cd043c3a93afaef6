#include "lgs/controller.hpp"

#include <algorithm>

#include "lgs/errors.hpp"
#include "lgs/monitor.hpp"
#include "lgs/plant.hpp"

namespace lgs::controller {

// ---- voting -------------------------------------------------------------------

VoteResult vote3(Raw a, Raw b, Raw c, std::array<bool, 3> validity) {
  const std::array<Raw, 3> v{a, b, c};
  VoteResult r;
  r.valid_channels = validity;
  int n = 0, ones = 0;
  for (int i = 0; i < 3; ++i)
    if (validity[i]) {
      ++n;
      ones += v[i] ? 1 : 0;
    }
  if (n == 0) return r;

  if (ones == 0 || ones == n) {
    r.status = VoteStatus::Decided;
    r.value = ones ? 1 : 0;
    r.unanimous = true;
    return r;
  }
  if (n == 2) {
    r.status = VoteStatus::NoDecision;
    for (int i = 0; i < 3; ++i) r.dissent[i] = validity[i];
    return r;
  }
  r.status = VoteStatus::Decided;
  r.value = ones >= 2 ? 1 : 0;
  for (int i = 0; i < 3; ++i) r.dissent[i] = validity[i] && v[i] != r.value;
  return r;
}

ControllerInternals update_channel_health(const ControllerInternals& in,
                                          const DissentFlags& dissent, int threshold,
                                          const SensorMask& mask) {
  ControllerInternals out = in;
  const int limit = std::max(threshold, 1);
  for (int s = 0; s < kSensors; ++s) {
    if (!mask[s]) continue;
    for (int ch = 0; ch < kChannels; ++ch) {
      if (!out.channel_valid[s][ch]) continue;
      auto& count = out.disagree_count[s][ch];
      if (dissent[s][ch]) {
        if (count < 255) ++count;
        if (count >= limit) out.channel_valid[s][ch] = false;
      } else {
        count = 0;
      }
    }
  }
  for (auto sn : kAllSensors)
    if (out.valid_count(sn) <= 1) out.anomaly_armed = true;
  return out;
}

VoteOutcome vote_inputs(const SensedInputs& inputs, const ControllerInternals& in,
                        const SensorMask& mask) {
  VoteOutcome out{in.voted, {}};
  for (auto sn : kAllSensors) {
    if (!mask[idx(sn)]) continue;
    const auto& valid = in.channel_valid[idx(sn)];
    for (int d = 0; d < device_count(sn); ++d) {
      auto r = vote3(inputs.get(sn, 0, d), inputs.get(sn, 1, d), inputs.get(sn, 2, d), valid);
      if (r.status == VoteStatus::Decided) out.view.set(sn, d, r.value);
      for (int ch = 0; ch < kChannels; ++ch) out.dissent[idx(sn)][ch] |= r.dissent[ch];
    }
  }
  return out;
}

ControllerInternals apply_vote(const ControllerInternals& in, const SensedInputs& inputs,
                               int threshold, const SensorMask& mask) {
  auto outcome = vote_inputs(inputs, in, mask);
  auto out = update_channel_health(in, outcome.dissent, threshold, mask);
  out.voted = outcome.view;
  return out;
}

VotedView module_view(const SensedInputs& k_inputs, const ControllerInternals& in) {
  return vote_inputs(k_inputs, in).view;
}

// ---- spawn / merge ------------------------------------------------------------

KIndexedState spawn_inputs(const SensedInputs& global, const KIndexedState& k,
                           const SimConfig& cfg) {
  KIndexedState out = k;
  out.k_inputs[0] = global;
  if (!cfg.has(MutantId::SkipSpawn)) out.k_inputs[1] = global;
  return out;
}

Light light_for(bool on) { return on ? Light::lightON : Light::lightOFF; }

std::pair<OrderOutputs, StateOutputs> merge_outputs(const KIndexedState& k, const SimConfig& cfg) {
  const bool use_and = cfg.has(MutantId::SwapMergeToAND);
  auto join = [use_and](bool a, bool b) { return use_and ? (a && b) : (a || b); };
  const auto& a = k.k_orders[0];
  const auto& b = k.k_orders[1];
  OrderOutputs o;
  o.general_EV = join(a.general_EV, b.general_EV);
  o.open_EV = join(a.open_EV, b.open_EV);
  o.close_EV = join(a.close_EV, b.close_EV);
  o.extend_EV = join(a.extend_EV, b.extend_EV);
  o.retract_EV = join(a.retract_EV, b.retract_EV);

  const auto& sa = k.k_state_outputs[0];
  const auto& sb = k.k_state_outputs[1];
  StateOutputs so;
  so.gears_locked_down = join(sa.gears_locked_down, sb.gears_locked_down);
  so.gears_maneuvering = join(sa.gears_maneuvering, sb.gears_maneuvering);
  so.anomaly = join(sa.anomaly, sb.anomaly);
  so.greenLight = light_for(so.gears_locked_down);
  so.orangeLight = light_for(so.gears_maneuvering);
  so.redLight = light_for(so.anomaly);
  return {o, so};
}

// ---- sequences ----------------------------------------------------------------

namespace {

constexpr std::array<SequenceStep, kSequenceLength> kOutgoing{{
    {"stmlt_general_EV", Valve::general, true},
    {"stmlt_door_opening", Valve::open, true},
    {"stmlt_gear_outgoing", Valve::extend, true},
    {"stop_stmlt_gear_outgoing", Valve::extend, false},
    {"stop_stmlt_door_opening", Valve::open, false},
    {"stmlt_door_closure", Valve::close, true},
    {"stop_stmlt_door_closure", Valve::close, false},
    {"stop_stmlt_general_EV", Valve::general, false},
}};

constexpr std::array<SequenceStep, kSequenceLength> kRetraction{{
    {"rt_stmlt_general_EV", Valve::general, true},
    {"rt_stmlt_door_opening", Valve::open, true},
    {"stmlt_gear_retraction", Valve::retract, true},
    {"stop_stmlt_gear_retraction", Valve::retract, false},
    {"rt_stop_stmlt_door_opening", Valve::open, false},
    {"rt_stmlt_door_closure", Valve::close, true},
    {"rt_stop_stmlt_door_closure", Valve::close, false},
    {"rt_stop_stmlt_general_EV", Valve::general, false},
}};

// Indexed by the interrupted sequence's pending step.
constexpr std::array<ResumeEntry, kSequenceLength + 1> kResume{{
    {1, false, false},  // idle: start over
    {1, false, false},
    {2, false, false},  // general_EV already on
    {3, false, false},  // doors opening or open
    {3, true, false},   // gears mid-travel: reverse the gear valve
    {3, false, false},  // gears at old target, doors still open
    {3, false, false},
    {2, false, true},   // doors closing: stop and reopen
    {2, false, false},  // doors closed, general_EV still on
}};

constexpr std::array<std::string_view, kModuleEvents - kSeqEvents> kMonitorNames{
    "monitor_gears_locked_Down", "monitor_gears_unlocked", "monitor_gears_maneuvering",
    "monitor_gears_stopped", "monitor_anomaly"};

Valve gear_valve(HandleState dir) { return dir == HandleState::hDown ? Valve::extend : Valve::retract; }

}  // namespace

const std::array<SequenceStep, kSequenceLength>& sequence_table(HandleState direction) {
  return direction == HandleState::hDown ? kOutgoing : kRetraction;
}

ResumeEntry resume_step(std::uint8_t interrupted_step) {
  return kResume[std::min<std::uint8_t>(interrupted_step, kSequenceLength)];
}

bool valve(const OrderOutputs& o, Valve v) {
  switch (v) {
    case Valve::general: return o.general_EV;
    case Valve::open: return o.open_EV;
    case Valve::close: return o.close_EV;
    case Valve::extend: return o.extend_EV;
    case Valve::retract: return o.retract_EV;
  }
  return false;
}

void set_valve(OrderOutputs& o, Valve v, bool value) {
  switch (v) {
    case Valve::general: o.general_EV = value; break;
    case Valve::open: o.open_EV = value; break;
    case Valve::close: o.close_EV = value; break;
    case Valve::extend: o.extend_EV = value; break;
    case Valve::retract: o.retract_EV = value; break;
  }
}

// ---- module events ------------------------------------------------------------

std::string_view module_event_name(int ev) {
  if (ev < kSequenceLength) return kOutgoing[ev].name;
  if (ev < kSeqEvents) return kRetraction[ev - kSequenceLength].name;
  return kMonitorNames[ev - kSeqEvents];
}

namespace {

bool sequence_guard(const SystemState& s, int m, HandleState dir, int step,
                    const VotedView& v, const SimConfig& cfg) {
  const auto& k = s.kstate;
  const auto& o = k.k_orders[m];
  const std::uint8_t pending = dir == HandleState::hDown ? k.k_nextOGseq[m] : k.k_nextRTseq[m];
  if (s.internals.order != dir || pending != step || k.k_stepped[m]) return false;

  const bool outgoing = dir == HandleState::hDown;
  switch (step) {
    case 1: return v.handle == dir;
    case 2: return o.general_EV && !o.close_EV;
    case 3: {
      const bool g0 = (outgoing && cfg.has(MutantId::DropGeneralEVGuard)) || o.general_EV;
      const bool doors = (outgoing && cfg.has(MutantId::DropDoorGuardOnExtend)) ||
                         (v.no_door_closed() && v.all_doors_open());
      const bool other_gear_off = !valve(o, gear_valve(opposite(dir)));
      return g0 && v.handle == dir && doors && other_gear_off;
    }
    case 4:
      return outgoing ? (v.all_gears_extended() && !v.gear_retracted[0] && !v.gear_retracted[1] &&
                         !v.gear_retracted[2])
                      : (v.all_gears_retracted() && !v.gear_extended[0] && !v.gear_extended[1] &&
                         !v.gear_extended[2]);
    case 5: return !valve(o, gear_valve(dir));
    case 6: return !o.open_EV;
    case 7: return v.all_doors_closed();
    case 8: return !o.close_EV;
    default: return false;
  }
}

}  // namespace

bool module_event_enabled(const SystemState& s, ModuleId mid, int ev, const SimConfig& cfg) {
  const int m = mid.index();
  const auto& k = s.kstate;
  if (k.silent[m]) return false;
  const auto& so = k.k_state_outputs[m];

  if (ev == kMonAnomaly) return s.internals.anomaly_armed && !so.anomaly;
  if (so.anomaly) return false;

  const auto& o = k.k_orders[m];
  switch (ev) {
    case kMonManeuvering: return o.any_maneuver() && !so.gears_maneuvering;
    case kMonManeuverStopped: return !o.any_maneuver() && so.gears_maneuvering;
    default: break;
  }

  const VotedView v = module_view(k.k_inputs[m], s.internals);
  if (ev == kMonGearsLockedDown) return v.all_gears_extended() && !so.gears_locked_down;
  if (ev == kMonGearsUnlocked) return !v.all_gears_extended() && so.gears_locked_down;

  if (ev < kSequenceLength) return sequence_guard(s, m, HandleState::hDown, ev + 1, v, cfg);
  if (ev < kSeqEvents)
    return sequence_guard(s, m, HandleState::hUp, ev - kSequenceLength + 1, v, cfg);
  return false;
}

void fire_module_event(SystemState& s, ModuleId mid, int ev) {
  const int m = mid.index();
  auto& k = s.kstate;
  auto& so = k.k_state_outputs[m];
  switch (ev) {
    case kMonGearsLockedDown:
      so.gears_locked_down = true;
      so.greenLight = Light::lightON;
      break;
    case kMonGearsUnlocked:
      so.gears_locked_down = false;
      so.greenLight = Light::lightOFF;
      break;
    case kMonManeuvering:
      so.gears_maneuvering = true;
      so.orangeLight = Light::lightON;
      break;
    case kMonManeuverStopped:
      so.gears_maneuvering = false;
      so.orangeLight = Light::lightOFF;
      break;
    case kMonAnomaly:
      so.anomaly = true;
      so.redLight = Light::lightON;
      break;
    default: {
      const bool outgoing = ev < kSequenceLength;
      const int step = outgoing ? ev + 1 : ev - kSequenceLength + 1;
      const auto& def = (outgoing ? kOutgoing : kRetraction)[step - 1];
      set_valve(k.k_orders[m], def.valve, def.value);
      auto& pending = outgoing ? k.k_nextOGseq[m] : k.k_nextRTseq[m];
      pending = step == kSequenceLength ? 0 : static_cast<std::uint8_t>(step + 1);
      if (step == kSequenceLength) k.k_endCycle[m] = true;
      k.k_stepped[m] = true;
      break;
    }
  }
  s.cursor.outputs_dirty = true;
}

std::vector<int> module_step(SystemState& s, ModuleId m, const SimConfig& cfg) {
  std::vector<int> fired;
  for (int ev = 0; ev < kSeqEvents; ++ev)
    if (module_event_enabled(s, m, ev, cfg)) {
      fire_module_event(s, m, ev);
      fired.push_back(ev);
      break;
    }
  for (int ev = kSeqEvents; ev < kModuleEvents; ++ev)
    if (module_event_enabled(s, m, ev, cfg)) {
      fire_module_event(s, m, ev);
      fired.push_back(ev);
    }
  return fired;
}

SystemState handle_event(HandleState direction, const SystemState& s, const SimConfig& cfg) {
  if (direction == s.internals.order) throw NoOpHandleMove();
  SystemState n = s;
  const HandleState old = s.internals.order;

  n.plant.pilot_handle = direction;
  n.plant = plant::switch_transition(n.plant, true, false);
  constexpr std::array<SensorName, 2> pilot_side{SensorName::handle,
                                                  SensorName::analogical_switch};
  const SensedInputs sensed =
      plant::sense_only(n.plant, n.cursor.macro_cycle, n.inputs, pilot_side);
  if (!(sensed == n.inputs)) n.cursor.inputs_dirty = true;
  n.inputs = sensed;
  SensorMask mask{};
  mask[idx(SensorName::handle)] = mask[idx(SensorName::analogical_switch)] = true;
  n.internals = apply_vote(n.internals, n.inputs, cfg.vote_threshold, mask);

  auto invert = [&](std::uint8_t& og, std::uint8_t& rt, OrderOutputs* orders) {
    const std::uint8_t interrupted = old == HandleState::hDown ? og : rt;
    const ResumeEntry r = resume_step(interrupted);
    if (orders) {
      if (r.cut_gear_valve) set_valve(*orders, gear_valve(old), false);
      if (r.cut_close_valve) orders->close_EV = false;
    }
    og = direction == HandleState::hDown ? r.step : 0;
    rt = direction == HandleState::hUp ? r.step : 0;
  };

  n.internals.order = direction;
  n.internals.endCycle = false;
  invert(n.internals.nextOGseq, n.internals.nextRTseq, nullptr);

  auto& k = n.kstate;
  for (int m = 0; m < kModules; ++m) {
    k.k_endCycle[m] = false;
    if (k.k_state_outputs[m].anomaly) continue;  // frozen
    const OrderOutputs before = k.k_orders[m];
    invert(k.k_nextOGseq[m], k.k_nextRTseq[m], k.silent[m] ? nullptr : &k.k_orders[m]);
    if (!(before == k.k_orders[m])) n.cursor.outputs_dirty = true;
  }

  n.ldate = {};
  return monitor::stamp(direction == HandleState::hDown ? ObsEvent::downH : ObsEvent::upH, n);
}

SystemState silence_module(const SystemState& s, ModuleId mid) {
  SystemState n = s;
  const int m = mid.index();
  n.kstate.silent[m] = true;
  n.kstate.k_orders[m] = OrderOutputs{};
  n.kstate.k_state_outputs[m] = StateOutputs{};
  n.cursor.outputs_dirty = true;
  return n;
}

}  // namespace lgs::controller
