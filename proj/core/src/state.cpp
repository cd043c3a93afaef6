#include "lgs/state.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lgs {

// ---- SensedInputs / VotedView ---------------------------------------------

Raw SensedInputs::get(SensorName s, int ch, int dev) const {
  switch (s) {
    case SensorName::handle: return static_cast<Raw>(handle[ch]);
    case SensorName::analogical_switch: return static_cast<Raw>(analogical_switch[ch]);
    case SensorName::gear_extended: return gear_extended[ch][dev];
    case SensorName::gear_retracted: return gear_retracted[ch][dev];
    case SensorName::door_closed: return door_closed[ch][dev];
    case SensorName::door_open: return door_open[ch][dev];
  }
  return 0;
}

void SensedInputs::set(SensorName s, int ch, int dev, Raw v) {
  switch (s) {
    case SensorName::handle: handle[ch] = static_cast<HandleState>(v); break;
    case SensorName::analogical_switch: analogical_switch[ch] = static_cast<SwitchState>(v); break;
    case SensorName::gear_extended: gear_extended[ch][dev] = v; break;
    case SensorName::gear_retracted: gear_retracted[ch][dev] = v; break;
    case SensorName::door_closed: door_closed[ch][dev] = v; break;
    case SensorName::door_open: door_open[ch][dev] = v; break;
  }
}

Raw VotedView::get(SensorName s, int dev) const {
  switch (s) {
    case SensorName::handle: return static_cast<Raw>(handle);
    case SensorName::analogical_switch: return static_cast<Raw>(analogical_switch);
    case SensorName::gear_extended: return gear_extended[dev];
    case SensorName::gear_retracted: return gear_retracted[dev];
    case SensorName::door_closed: return door_closed[dev];
    case SensorName::door_open: return door_open[dev];
  }
  return 0;
}

void VotedView::set(SensorName s, int dev, Raw v) {
  switch (s) {
    case SensorName::handle: handle = static_cast<HandleState>(v); break;
    case SensorName::analogical_switch: analogical_switch = static_cast<SwitchState>(v); break;
    case SensorName::gear_extended: gear_extended[dev] = v; break;
    case SensorName::gear_retracted: gear_retracted[dev] = v; break;
    case SensorName::door_closed: door_closed[dev] = v; break;
    case SensorName::door_open: door_open[dev] = v; break;
  }
}

namespace {
bool all_of3(const std::array<bool, 3>& a) { return a[0] && a[1] && a[2]; }
bool none_of3(const std::array<bool, 3>& a) { return !a[0] && !a[1] && !a[2]; }
}  // namespace

bool VotedView::all_gears_extended() const { return all_of3(gear_extended); }
bool VotedView::all_gears_retracted() const { return all_of3(gear_retracted); }
bool VotedView::all_doors_open() const { return all_of3(door_open); }
bool VotedView::all_doors_closed() const { return all_of3(door_closed); }
bool VotedView::no_door_closed() const { return none_of3(door_closed); }

int ControllerInternals::valid_count(SensorName s) const {
  const auto& v = channel_valid[idx(s)];
  return static_cast<int>(std::count(v.begin(), v.end(), true));
}

// ---- FaultSpec --------------------------------------------------------------

int FaultSpec::device_index() const {
  if (auto d = std::get_if<DoorId>(&device)) return idx(*d);
  if (auto g = std::get_if<GearId>(&device)) return idx(*g);
  return 0;
}

void FaultSpec::validate() const {
  const bool has_door = std::holds_alternative<DoorId>(device);
  const bool has_gear = std::holds_alternative<GearId>(device);
  if (is_door_sensor(sensor) && !has_door)
    throw std::invalid_argument(std::string(to_string(sensor)) + " fault needs a door (FD/RD/LD)");
  if (is_gear_sensor(sensor) && !has_gear)
    throw std::invalid_argument(std::string(to_string(sensor)) + " fault needs a gear (FG/LG/RG)");
  if (!is_per_device(sensor) && (has_door || has_gear))
    throw std::invalid_argument(std::string(to_string(sensor)) + " fault takes no device");
}

std::string to_string(const FaultSpec& f) {
  std::string out(to_string(f.sensor));
  out += ':' + std::to_string(f.channel.value());
  if (auto d = std::get_if<DoorId>(&f.device)) out += ':' + std::string(to_string(*d));
  if (auto g = std::get_if<GearId>(&f.device)) out += ':' + std::string(to_string(*g));
  out += ':' + std::string(to_string(f.mode));
  if (f.from_step != 0) out += '@' + std::to_string(f.from_step);
  return out;
}

FaultSpec parse_fault(std::string_view text) {
  auto fail = [&](const std::string& why) -> FaultSpec {
    throw std::invalid_argument("bad fault '" + std::string(text) + "': " + why);
  };
  std::string_view body = text;
  FaultSpec f;
  if (auto at = body.find('@'); at != std::string_view::npos) {
    const std::string from(body.substr(at + 1));
    if (from.empty() || from.find_first_not_of("0123456789") != std::string::npos)
      return fail("from-step must be a nonnegative integer");
    f.from_step = static_cast<std::uint32_t>(std::stoul(from));
    body = body.substr(0, at);
  }
  std::vector<std::string_view> parts;
  for (std::size_t pos = 0;;) {
    auto colon = body.find(':', pos);
    parts.push_back(body.substr(pos, colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() != 3 && parts.size() != 4)
    return fail("expected sensor:channel[:device]:mode");
  auto sensor = parse_sensor(parts[0]);
  if (!sensor) return fail("unknown sensor");
  f.sensor = *sensor;
  if (parts[1].size() != 1 || parts[1][0] < '1' || parts[1][0] > '3')
    return fail("channel must be 1, 2 or 3");
  f.channel = ChannelId(parts[1][0] - '0');
  if (parts.size() == 4) {
    if (auto d = parse_door(parts[2]))
      f.device = *d;
    else if (auto g = parse_gear(parts[2]))
      f.device = *g;
    else
      return fail("unknown device");
  }
  auto mode = parse_fault_mode(parts.back());
  if (!mode) return fail("unknown mode");
  f.mode = *mode;
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  return f;
}

void PlantState::add_fault(const FaultSpec& f) {
  f.validate();
  auto it = std::lower_bound(faults.begin(), faults.end(), f);
  if (it == faults.end() || !(*it == f)) faults.insert(it, f);
}

// ---- initial state ------------------------------------------------------------

SystemState initial_state() {
  SystemState s;
  s.plant.doorState.fill(DoorPhysState::ClosedLocked);
  s.plant.gearState.fill(GearPhysState::ExtendedLocked);
  s.plant.analogical_switch = SwitchState::openSW;
  s.plant.pilot_handle = HandleState::hDown;

  for (int ch = 0; ch < kChannels; ++ch) {
    s.inputs.handle[ch] = HandleState::hDown;
    s.inputs.analogical_switch[ch] = SwitchState::openSW;
    s.inputs.gear_extended[ch].fill(true);
    s.inputs.gear_retracted[ch].fill(false);
    s.inputs.door_closed[ch].fill(true);
    s.inputs.door_open[ch].fill(false);
  }

  auto& in = s.internals;
  in.order = HandleState::hDown;
  in.endCycle = true;
  for (auto& v : in.channel_valid) v.fill(true);
  in.voted.gear_extended.fill(true);
  in.voted.door_closed.fill(true);

  s.outputs.gears_locked_down = true;
  s.outputs.greenLight = Light::lightON;

  for (int m = 0; m < kModules; ++m) {
    s.kstate.k_inputs[m] = s.inputs;
    s.kstate.k_orders[m] = s.orders;
    s.kstate.k_state_outputs[m] = s.outputs;
    s.kstate.k_endCycle[m] = true;
  }
  return s;
}

// ---- SimConfig ------------------------------------------------------------------

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  template <class T>
  void e(T v) {
    byte(static_cast<std::uint8_t>(v));
  }
};

void hash_inputs(Fnv& f, const SensedInputs& in) {
  for (int ch = 0; ch < kChannels; ++ch) {
    f.e(in.handle[ch]);
    f.e(in.analogical_switch[ch]);
    for (int d = 0; d < 3; ++d) {
      f.e(in.gear_extended[ch][d]);
      f.e(in.gear_retracted[ch][d]);
      f.e(in.door_closed[ch][d]);
      f.e(in.door_open[ch][d]);
    }
  }
}

void hash_orders(Fnv& f, const OrderOutputs& o) {
  f.e(o.general_EV);
  f.e(o.open_EV);
  f.e(o.close_EV);
  f.e(o.extend_EV);
  f.e(o.retract_EV);
}

void hash_outputs(Fnv& f, const StateOutputs& o) {
  f.e(o.gears_locked_down);
  f.e(o.gears_maneuvering);
  f.e(o.anomaly);
  f.e(o.greenLight);
  f.e(o.orangeLight);
  f.e(o.redLight);
}

}  // namespace

std::uint64_t SimConfig::hash() const {
  Fnv f;
  f.e(interleaved);
  f.u64(static_cast<std::uint64_t>(vote_threshold));
  f.e(mutant.has_value());
  if (mutant) f.e(*mutant);
  return f.h;
}

// ---- fingerprint ------------------------------------------------------------------

std::uint64_t state_fingerprint(const SystemState& s, FingerprintMode mode) {
  Fnv f;
  const auto& p = s.plant;
  for (auto d : p.doorState) f.e(d);
  for (auto g : p.gearState) f.e(g);
  f.e(p.analogical_switch);
  f.e(p.pilot_handle);
  f.u64(p.faults.size());
  std::uint32_t last_activation = 0;
  for (const auto& fs : p.faults) {
    f.e(fs.sensor);
    f.e(fs.channel.value());
    f.e(fs.device.index());
    f.e(fs.device_index());
    f.e(fs.mode);
    f.u64(fs.from_step);
    last_activation = std::max(last_activation, fs.from_step);
  }

  hash_inputs(f, s.inputs);

  const auto& in = s.internals;
  f.e(in.order);
  f.e(in.nextOGseq);
  f.e(in.nextRTseq);
  f.e(in.endCycle);
  for (int k = 0; k < kSensors; ++k)
    for (int ch = 0; ch < kChannels; ++ch) {
      f.e(in.channel_valid[k][ch]);
      f.e(in.disagree_count[k][ch]);
    }
  for (auto sn : kAllSensors)
    for (int d = 0; d < device_count(sn); ++d) f.e(in.voted.get(sn, d));
  f.e(in.anomaly_armed);

  const auto& k = s.kstate;
  for (int m = 0; m < kModules; ++m) {
    hash_inputs(f, k.k_inputs[m]);
    hash_orders(f, k.k_orders[m]);
    hash_outputs(f, k.k_state_outputs[m]);
    f.e(k.k_nextOGseq[m]);
    f.e(k.k_nextRTseq[m]);
    f.e(k.k_endCycle[m]);
    f.e(k.k_stepped[m]);
    f.e(k.silent[m]);
  }
  hash_orders(f, s.orders);
  hash_outputs(f, s.outputs);

  const auto& c = s.cursor;
  f.e(c.phase);
  f.e(c.cycle_started);
  f.e(c.voted);
  f.e(c.inputs_dirty);
  f.e(c.outputs_dirty);
  for (bool b : c.door_moved) f.e(b);
  for (bool b : c.gear_moved) f.e(b);

  if (mode == FingerprintMode::Monitor) {
    f.u64(c.macro_cycle);
    f.u64(s.llc);
    for (const auto& d : s.ldate) {
      f.e(d.has_value());
      f.u64(d.value_or(0));
    }
  } else {
    f.u64(std::min(c.macro_cycle, last_activation));
    for (const auto& d : s.ldate) f.e(d.has_value());
  }
  return f.h;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

// ---- flat record ------------------------------------------------------------------

namespace {

class Flattener {
 public:
  FlatRecord rec;

  void b(std::string key, bool v) { rec.emplace_back(std::move(key), v ? "true" : "false"); }
  void n(std::string key, std::uint64_t v) { rec.emplace_back(std::move(key), std::to_string(v)); }
  void s(std::string key, std::string_view v) {
    rec.emplace_back(std::move(key), "\"" + std::string(v) + "\"");
  }
  void null(std::string key) { rec.emplace_back(std::move(key), "null"); }
  void raw(std::string key, std::string v) { rec.emplace_back(std::move(key), std::move(v)); }

  void inputs(const std::string& prefix, const SensedInputs& in) {
    for (int ch = 0; ch < kChannels; ++ch) s(prefix + "handle." + std::to_string(ch + 1), to_string(in.handle[ch]));
    for (int ch = 0; ch < kChannels; ++ch)
      s(prefix + "analogical_switch." + std::to_string(ch + 1), to_string(in.analogical_switch[ch]));
    grid(prefix + "gear_extended", in.gear_extended, true);
    grid(prefix + "gear_retracted", in.gear_retracted, true);
    grid(prefix + "door_closed", in.door_closed, false);
    grid(prefix + "door_open", in.door_open, false);
  }

  void orders(const std::string& prefix, const OrderOutputs& o) {
    b(prefix + "general_EV", o.general_EV);
    b(prefix + "open_EV", o.open_EV);
    b(prefix + "close_EV", o.close_EV);
    b(prefix + "extend_EV", o.extend_EV);
    b(prefix + "retract_EV", o.retract_EV);
  }

  void outputs(const std::string& prefix, const StateOutputs& o) {
    b(prefix + "gears_locked_down", o.gears_locked_down);
    b(prefix + "gears_maneuvering", o.gears_maneuvering);
    b(prefix + "anomaly", o.anomaly);
    s(prefix + "greenLight", to_string(o.greenLight));
    s(prefix + "orangeLight", to_string(o.orangeLight));
    s(prefix + "redLight", to_string(o.redLight));
  }

 private:
  void grid(const std::string& name, const BoolGrid& g, bool gears) {
    for (int ch = 0; ch < kChannels; ++ch)
      for (int d = 0; d < 3; ++d)
        b(name + "." + std::to_string(ch + 1) + "." +
              std::string(gears ? to_string(kAllGears[d]) : to_string(kAllDoors[d])),
          g[ch][d]);
  }
};

std::string device_suffix(SensorName sn, int d) {
  if (is_door_sensor(sn)) return "." + std::string(to_string(kAllDoors[d]));
  if (is_gear_sensor(sn)) return "." + std::string(to_string(kAllGears[d]));
  return "";
}

std::string voted_value(SensorName sn, Raw v) {
  if (sn == SensorName::handle) return "\"" + std::string(to_string(static_cast<HandleState>(v))) + "\"";
  if (sn == SensorName::analogical_switch)
    return "\"" + std::string(to_string(static_cast<SwitchState>(v))) + "\"";
  return v ? "true" : "false";
}

}  // namespace

FlatRecord flatten(const SystemState& st) {
  Flattener f;
  f.rec.reserve(400);
  const auto& p = st.plant;
  for (auto d : kAllDoors) f.s("doorState." + std::string(to_string(d)), to_string(p.doorState[idx(d)]));
  for (auto g : kAllGears) f.s("gearState." + std::string(to_string(g)), to_string(p.gearState[idx(g)]));
  f.s("switch", to_string(p.analogical_switch));
  f.s("pilot_handle", to_string(p.pilot_handle));
  {
    std::string arr = "[";
    for (std::size_t i = 0; i < p.faults.size(); ++i) {
      if (i) arr += ',';
      arr += "\"" + to_string(p.faults[i]) + "\"";
    }
    f.raw("faults", arr + "]");
  }

  f.inputs("", st.inputs);

  const auto& in = st.internals;
  f.s("order", to_string(in.order));
  f.n("nextOGseq", in.nextOGseq);
  f.n("nextRTseq", in.nextRTseq);
  f.b("endCycle", in.endCycle);
  for (auto sn : kAllSensors)
    for (int ch = 0; ch < kChannels; ++ch)
      f.b("channel_valid." + std::string(to_string(sn)) + "." + std::to_string(ch + 1),
          in.channel_valid[idx(sn)][ch]);
  for (auto sn : kAllSensors)
    for (int ch = 0; ch < kChannels; ++ch)
      f.n("disagree_count." + std::string(to_string(sn)) + "." + std::to_string(ch + 1),
          in.disagree_count[idx(sn)][ch]);
  for (auto sn : kAllSensors)
    for (int d = 0; d < device_count(sn); ++d)
      f.raw("voted." + std::string(to_string(sn)) + device_suffix(sn, d),
            voted_value(sn, in.voted.get(sn, d)));
  f.b("anomaly_armed", in.anomaly_armed);

  const auto& k = st.kstate;
  for (int m = 0; m < kModules; ++m) {
    const std::string pre = "k" + std::to_string(m + 1) + ".";
    f.inputs(pre, k.k_inputs[m]);
    f.orders(pre, k.k_orders[m]);
    f.outputs(pre, k.k_state_outputs[m]);
    f.n(pre + "nextOGseq", k.k_nextOGseq[m]);
    f.n(pre + "nextRTseq", k.k_nextRTseq[m]);
    f.b(pre + "endCycle", k.k_endCycle[m]);
    f.b(pre + "stepped", k.k_stepped[m]);
    f.b(pre + "silent", k.silent[m]);
  }

  f.orders("", st.orders);
  f.outputs("", st.outputs);

  f.n("llc", st.llc);
  for (int e = 0; e < kObsEvents; ++e) {
    const std::string key = "ldate." + std::string(to_string(static_cast<ObsEvent>(e)));
    if (st.ldate[e])
      f.n(key, *st.ldate[e]);
    else
      f.null(key);
  }

  const auto& c = st.cursor;
  f.s("phase", to_string(c.phase));
  f.n("macro_cycle", c.macro_cycle);
  f.b("cycle_started", c.cycle_started);
  f.b("voted_this_cycle", c.voted);
  f.b("inputs_dirty", c.inputs_dirty);
  f.b("outputs_dirty", c.outputs_dirty);
  for (auto d : kAllDoors) f.b("door_moved." + std::string(to_string(d)), c.door_moved[idx(d)]);
  for (auto g : kAllGears) f.b("gear_moved." + std::string(to_string(g)), c.gear_moved[idx(g)]);
  return std::move(f.rec);
}

std::string to_json(const FlatRecord& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : r) {
    if (!first) out += ',';
    first = false;
    out += '"';
    out += k;
    out += "\":";
    out += v;
  }
  out += '}';
  return out;
}

FlatRecord diff(const FlatRecord& before, const FlatRecord& after) {
  FlatRecord out;
  if (before.size() != after.size()) return after;
  for (std::size_t i = 0; i < after.size(); ++i)
    if (before[i].first != after[i].first || before[i].second != after[i].second)
      out.push_back(after[i]);
  return out;
}

}  // namespace lgs
