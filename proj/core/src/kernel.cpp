#include "lgs/kernel.hpp"

#include <algorithm>
#include <stdexcept>

#include "lgs/controller.hpp"
#include "lgs/errors.hpp"
#include "lgs/plant.hpp"

namespace lgs::kernel {

namespace {

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  auto add = [&](std::string name, EventKind k, Phase p, int a = 0, int b = 0) {
    c.push_back({std::move(name), k, p, static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)});
  };
  for (int e = 0; e < 4; ++e) {
    const std::string n = "door_" + std::string(plant::to_string(plant::kDoorEdges[e]));
    add(n, EventKind::DoorSync, Phase::Sense, e);
    for (auto d : kAllDoors)
      add(n + "." + std::string(lgs::to_string(d)), EventKind::DoorDevice, Phase::Sense, e, idx(d));
  }
  for (int e = 0; e < 6; ++e) {
    const std::string n = "gear_" + std::string(plant::to_string(plant::kGearEdges[e]));
    add(n, EventKind::GearSync, Phase::Sense, e);
    for (auto g : kAllGears)
      add(n + "." + std::string(lgs::to_string(g)), EventKind::GearDevice, Phase::Sense, e, idx(g));
  }
  add("switch_open", EventKind::SwitchOpen, Phase::Sense);
  add("sense_refresh", EventKind::SenseRefresh, Phase::Sense);
  add("vote_health", EventKind::VoteHealth, Phase::Decision);
  add("spawn_inputs", EventKind::Spawn, Phase::Decision);
  for (int m = 0; m < kModules; ++m)
    for (int ev = 0; ev < controller::kModuleEvents; ++ev)
      add("k" + std::to_string(m + 1) + "." + std::string(controller::module_event_name(ev)),
          EventKind::Module, Phase::Decision, m, ev);
  add("merge_outputs", EventKind::Merge, Phase::Order);
  add("stamp_dcge", EventKind::StampDcge, Phase::Order);
  add("stamp_doge", EventKind::StampDoge, Phase::Order);
  return c;
}

Phase next_phase(Phase p) {
  switch (p) {
    case Phase::Sense: return Phase::Decision;
    case Phase::Decision: return Phase::Order;
    case Phase::Order: break;
  }
  return Phase::Sense;
}

// Per-state facts shared by several guards.
struct Ctx {
  const SystemState& s;
  const SimConfig& cfg;
  mutable std::optional<bool> vote_pending_;

  bool vote_pending() const {
    if (!vote_pending_) {
      vote_pending_ = !s.cursor.voted &&
                      !(controller::apply_vote(s.internals, s.inputs, cfg.vote_threshold) ==
                        s.internals);
    }
    return *vote_pending_;
  }
  bool decision_settled() const { return !s.cursor.inputs_dirty && !vote_pending(); }
};

bool door_edge_ok(const SystemState& s, int e, int d) {
  const auto def = plant::edge_def(plant::kDoorEdges[e]);
  return !s.cursor.door_moved[d] && s.plant.doorState[d] == def.from &&
         plant::edge_driven(plant::kDoorEdges[e], s.orders);
}

bool gear_edge_ok(const SystemState& s, int e, int g) {
  const auto def = plant::edge_def(plant::kGearEdges[e]);
  return !s.cursor.gear_moved[g] && s.plant.gearState[g] == def.from &&
         plant::edge_driven(plant::kGearEdges[e], s.orders);
}

bool stamp_ok(const SystemState& s, HandleState dir) {
  const auto& in = s.internals;
  if (s.cursor.outputs_dirty || !in.endCycle || in.order != dir) return false;
  const ObsEvent start = dir == HandleState::hDown ? ObsEvent::downH : ObsEvent::upH;
  const ObsEvent end = dir == HandleState::hDown ? ObsEvent::dcge : ObsEvent::doge;
  if (!s.stamp_of(start) || s.stamp_of(end)) return false;
  const bool gears = dir == HandleState::hDown ? in.voted.all_gears_extended()
                                               : in.voted.all_gears_retracted();
  return gears && in.voted.all_doors_closed();
}

bool enabled(const Ctx& c, const CatalogEntry& e) {
  const SystemState& s = c.s;
  switch (e.kind) {
    case EventKind::DoorSync:
      if (c.cfg.interleaved) return false;
      for (int d = 0; d < kDoors; ++d)
        if (!door_edge_ok(s, e.a, d)) return false;
      return true;
    case EventKind::DoorDevice: return c.cfg.interleaved && door_edge_ok(s, e.a, e.b);
    case EventKind::GearSync:
      if (c.cfg.interleaved) return false;
      for (int g = 0; g < kGears; ++g)
        if (!gear_edge_ok(s, e.a, g)) return false;
      return true;
    case EventKind::GearDevice: return c.cfg.interleaved && gear_edge_ok(s, e.a, e.b);
    case EventKind::SwitchOpen:
      return s.internals.endCycle && s.plant.analogical_switch == SwitchState::closedSW;
    case EventKind::SenseRefresh:
      return !(plant::sense(s.plant, s.cursor.macro_cycle) == s.inputs);
    case EventKind::VoteHealth: return c.vote_pending();
    case EventKind::Spawn: return s.cursor.inputs_dirty && !c.vote_pending();
    case EventKind::Module:
      return c.decision_settled() &&
             controller::module_event_enabled(s, ModuleId(e.a + 1), e.b, c.cfg);
    case EventKind::Merge: return s.cursor.outputs_dirty;
    case EventKind::StampDcge: return stamp_ok(s, HandleState::hDown);
    case EventKind::StampDoge: return stamp_ok(s, HandleState::hUp);
  }
  return false;
}

void apply(SystemState& s, const CatalogEntry& e, const SimConfig& cfg) {
  auto& cur = s.cursor;
  switch (e.kind) {
    case EventKind::DoorSync:
    case EventKind::DoorDevice: {
      const auto to = plant::edge_def(plant::kDoorEdges[e.a]).to;
      for (int d = 0; d < kDoors; ++d) {
        if (e.kind == EventKind::DoorDevice && d != e.b) continue;
        s.plant.doorState[d] = to;
        cur.door_moved[d] = true;
      }
      break;
    }
    case EventKind::GearSync:
    case EventKind::GearDevice: {
      const auto to = plant::edge_def(plant::kGearEdges[e.a]).to;
      for (int g = 0; g < kGears; ++g) {
        if (e.kind == EventKind::GearDevice && g != e.b) continue;
        s.plant.gearState[g] = to;
        cur.gear_moved[g] = true;
      }
      break;
    }
    case EventKind::SwitchOpen: s.plant = plant::switch_transition(s.plant, false, true); break;
    case EventKind::SenseRefresh:
      s.inputs = plant::sense(s.plant, cur.macro_cycle);
      cur.inputs_dirty = true;
      break;
    case EventKind::VoteHealth:
      s.internals = controller::apply_vote(s.internals, s.inputs, cfg.vote_threshold);
      cur.voted = true;
      break;
    case EventKind::Spawn:
      s.kstate = controller::spawn_inputs(s.inputs, s.kstate, cfg);
      cur.inputs_dirty = false;
      break;
    case EventKind::Module: controller::fire_module_event(s, ModuleId(e.a + 1), e.b); break;
    case EventKind::Merge: {
      auto [o, so] = controller::merge_outputs(s.kstate, cfg);
      s.orders = o;
      s.outputs = so;
      const auto& k = s.kstate;
      bool any_live = false;
      std::uint8_t og = 0, rt = 0;
      bool end = false;
      for (int m = 0; m < kModules; ++m) {
        end = end || k.k_endCycle[m];
        if (k.silent[m]) continue;
        any_live = true;
        og = std::max(og, k.k_nextOGseq[m]);
        rt = std::max(rt, k.k_nextRTseq[m]);
      }
      if (any_live) {
        s.internals.nextOGseq = og;
        s.internals.nextRTseq = rt;
      }
      s.internals.endCycle = end;
      cur.outputs_dirty = false;
      break;
    }
    case EventKind::StampDcge: s = monitor::stamp(ObsEvent::dcge, s); break;
    case EventKind::StampDoge: s = monitor::stamp(ObsEvent::doge, s); break;
  }
}

bool any_enabled(const SystemState& s, Phase p, const SimConfig& cfg) {
  Ctx c{s, cfg, {}};
  for (const auto& e : catalog())
    if (e.phase == p && enabled(c, e)) return true;
  return false;
}

void advance(SystemState& s) {
  auto& cur = s.cursor;
  cur.phase = next_phase(cur.phase);
  if (cur.phase == Phase::Sense) {
    ++cur.macro_cycle;
    cur.cycle_started = false;
    cur.voted = false;
    cur.door_moved = {};
    cur.gear_moved = {};
    s.kstate.k_stepped = {};
  }
}

std::string_view env_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::HandleUp: return "handle_up";
    case Event::Kind::HandleDown: return "handle_down";
    case Event::Kind::InjectFault: return "inject_fault";
    case Event::Kind::ClearFaults: return "clear_faults";
    case Event::Kind::SilenceModule: return "silence_module";
    case Event::Kind::Catalog: break;
  }
  return "?";
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = build_catalog();
  return c;
}

std::uint64_t catalog_version() {
  static const std::uint64_t v = [] {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](unsigned char b) {
      h ^= b;
      h *= 1099511628211ull;
    };
    for (const auto& e : catalog()) {
      for (char ch : e.name) mix(static_cast<unsigned char>(ch));
      mix(static_cast<unsigned char>(e.phase));
      mix(0xff);
    }
    return h;
  }();
  return v;
}

std::optional<int> find_event(std::string_view name) {
  const auto& c = catalog();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

Event Event::from(const ScriptedAction& a) {
  Event e;
  switch (a.kind) {
    case ActionKind::HandleUp: e.kind = Kind::HandleUp; break;
    case ActionKind::HandleDown: e.kind = Kind::HandleDown; break;
    case ActionKind::InjectFault:
      e.kind = Kind::InjectFault;
      e.fault = a.fault;
      break;
    case ActionKind::ClearFaults: e.kind = Kind::ClearFaults; break;
    case ActionKind::SilenceModule:
      e.kind = Kind::SilenceModule;
      e.module = a.module;
      break;
  }
  return e;
}

std::string to_string(const Event& e) {
  switch (e.kind) {
    case Event::Kind::Catalog: return catalog().at(static_cast<std::size_t>(e.index)).name;
    case Event::Kind::InjectFault: return "inject_fault(" + lgs::to_string(e.fault) + ")";
    case Event::Kind::SilenceModule:
      return "silence_module(" + std::to_string(e.module.value()) + ")";
    default: return std::string(env_name(e.kind));
  }
}

Event parse_event(std::string_view text) {
  if (auto i = find_event(text)) return Event::of(*i);
  for (auto k : {Event::Kind::HandleUp, Event::Kind::HandleDown, Event::Kind::ClearFaults})
    if (text == env_name(k)) return Event{k, 0, {}, {}};
  auto arg = [&](std::string_view head) -> std::optional<std::string_view> {
    if (text.size() > head.size() + 2 && text.substr(0, head.size()) == head &&
        text[head.size()] == '(' && text.back() == ')')
      return text.substr(head.size() + 1, text.size() - head.size() - 2);
    return std::nullopt;
  };
  try {
    if (auto a = arg("inject_fault")) {
      Event e{Event::Kind::InjectFault, 0, parse_fault(*a), {}};
      return e;
    }
    if (auto a = arg("silence_module")) {
      const int m = std::stoi(std::string(*a));
      if (m < 1 || m > kModules) throw std::invalid_argument("module out of range");
      return Event{Event::Kind::SilenceModule, 0, {}, ModuleId(m)};
    }
  } catch (const std::exception& ex) {
    throw TraceFormatError("bad event '" + std::string(text) + "': " + ex.what());
  }
  throw TraceFormatError("unknown event '" + std::string(text) + "'");
}

bool event_enabled(const SystemState& s, int i, const SimConfig& cfg) {
  Ctx c{s, cfg, {}};
  return enabled(c, catalog().at(static_cast<std::size_t>(i)));
}

std::vector<int> enabled_events(const SystemState& s, Phase phase, const SimConfig& cfg) {
  Ctx c{s, cfg, {}};
  std::vector<int> out;
  const auto& cat = catalog();
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat[i].phase == phase && enabled(c, cat[i])) out.push_back(static_cast<int>(i));
  return out;
}

SystemState normalize(const SystemState& s, const SimConfig& cfg) {
  if (any_enabled(s, s.cursor.phase, cfg)) return s;
  // Two full laps: after the first wrap every phase has been seen with fresh
  // per-cycle flags, so a second lap cannot find anything new.
  SystemState t = s;
  for (int i = 0; i < 6; ++i) {
    advance(t);
    if (any_enabled(t, t.cursor.phase, cfg)) return t;
  }
  return s;
}

bool quiescent(const SystemState& s, const SimConfig& cfg) {
  return !any_enabled(s, s.cursor.phase, cfg) && normalize(s, cfg) == s;
}

bool pilot_window(const SystemState& s, const SimConfig& cfg) {
  return !s.cursor.cycle_started || quiescent(s, cfg);
}

SystemState fire(const SystemState& s, const Event& e, const SimConfig& cfg) {
  SystemState n = s;
  switch (e.kind) {
    case Event::Kind::Catalog: {
      const auto& entry = catalog().at(static_cast<std::size_t>(e.index));
      if (entry.phase != s.cursor.phase || !event_enabled(s, e.index, cfg))
        throw std::logic_error("event not enabled: " + entry.name);
      apply(n, entry, cfg);
      n.cursor.cycle_started = true;
      break;
    }
    case Event::Kind::HandleUp: n = controller::handle_event(HandleState::hUp, s, cfg); break;
    case Event::Kind::HandleDown: n = controller::handle_event(HandleState::hDown, s, cfg); break;
    case Event::Kind::InjectFault: n.plant.add_fault(e.fault); break;
    case Event::Kind::ClearFaults: n.plant.faults.clear(); break;
    case Event::Kind::SilenceModule: n = controller::silence_module(s, e.module); break;
  }
  ++n.llc;
  return normalize(n, cfg);
}

// ---- policies -------------------------------------------------------------------

ChoicePolicy ChoicePolicy::seeded(std::uint64_t seed) {
  ChoicePolicy p;
  p.kind_ = PolicyKind::SeededRandom;
  p.seed_ = seed;
  p.rng_.seed(seed);
  return p;
}

ChoicePolicy ChoicePolicy::interactive() { return ChoicePolicy{}; }

ChoicePolicy ChoicePolicy::scripted(std::vector<std::string> names) {
  ChoicePolicy p;
  p.kind_ = PolicyKind::ScriptDriven;
  p.script_ = std::move(names);
  return p;
}

ChoicePolicy ChoicePolicy::explorer_branch() {
  ChoicePolicy p;
  p.kind_ = PolicyKind::ExplorerBranch;
  return p;
}

int ChoicePolicy::choose(const std::vector<int>& en) {
  if (en.empty()) throw std::logic_error("choose: nothing enabled");
  switch (kind_) {
    case PolicyKind::SeededRandom: return en[rng_() % en.size()];
    case PolicyKind::Interactive: return en.front();
    case PolicyKind::ScriptDriven: {
      if (pos_ >= script_.size()) throw Error("script exhausted");
      const auto& name = script_[pos_++];
      auto i = find_event(name);
      if (!i || std::find(en.begin(), en.end(), *i) == en.end())
        throw Error("scripted event not enabled: " + name);
      return *i;
    }
    case PolicyKind::ExplorerBranch: break;
  }
  throw std::logic_error("explorer branches are enumerated, not chosen");
}

std::optional<Fired> step(const SystemState& s, ChoicePolicy& policy, const SimConfig& cfg) {
  const auto en = enabled_events(s, s.cursor.phase, cfg);
  if (en.empty()) return std::nullopt;
  const Event e = Event::of(policy.choose(en));
  return Fired{fire(s, e, cfg), e};
}

SystemState preset_state(std::string_view preset, const SimConfig& cfg) {
  if (preset == "stable_ground") return initial_state();
  if (preset == "post_hup") return fire(initial_state(), Event::handle(HandleState::hUp), cfg);
  throw Error("unknown preset '" + std::string(preset) + "'");
}

// ---- run / replay ----------------------------------------------------------------

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Quiescent: return "quiescent";
    case StopReason::MaxSteps: return "StepBudgetExceeded";
    case StopReason::Violation: return "violation";
  }
  return "?";
}

namespace {

struct Recorder {
  RunResult& res;
  bool deltas;
  std::uint16_t seen = 0;
  FlatRecord last;  // flattened previous state, kept only when recording deltas

  void start(const SystemState& s) {
    if (deltas) last = flatten(s);
  }

  void record(std::uint64_t step, const Event& e, const SystemState& after) {
    TraceRecord r;
    r.step = step;
    r.event = to_string(e);
    r.llc = after.llc;
    r.fingerprint = state_fingerprint(after);
    if (deltas) {
      FlatRecord now = flatten(after);
      r.delta = diff(last, now);
      last = std::move(now);
    }
    res.trace.records.push_back(std::move(r));
  }

  // Returns true when something new failed.
  bool check(std::uint64_t step, const Event& e, const SystemState& s) {
    bool fresh = false;
    const std::uint16_t mask = monitor::failing_mask(s);
    for (auto r : monitor::kStateRequirements) {
      const auto bit = static_cast<std::uint16_t>(1u << idx(r));
      if ((mask & bit) && !(seen & bit)) {
        seen |= bit;
        res.violations.push_back({r, false, false, fingerprint_hex(state_fingerprint(s)), step});
        fresh = true;
      }
    }
    if (e.kind == Event::Kind::Catalog) {
      const auto k = catalog()[static_cast<std::size_t>(e.index)].kind;
      if (k == EventKind::StampDcge || k == EventKind::StampDoge) {
        const auto which =
            k == EventKind::StampDcge ? monitor::Requirement::R11bis : monitor::Requirement::R12bis;
        const auto log = monitor::ObservationLog::of(s);
        auto v = monitor::check_R1(log, which);
        v.position = step;
        res.cycle_verdicts.push_back(v);
        res.cycle_logs.push_back(log);
        const auto bit = static_cast<std::uint16_t>(1u << idx(which));
        if (!v.holds && !(seen & bit)) {
          seen |= bit;
          res.violations.push_back(v);
          fresh = true;
        }
      }
    }
    return fresh;
  }
};

std::string summary_of(const RunResult& r) {
  std::string out;
  auto add = [&](const std::string& x) {
    if (!out.empty()) out += ", ";
    out += x;
  };
  const auto& s = r.final_state;
  if (s.stamp_of(ObsEvent::dcge)) add("dcge stamped");
  if (s.stamp_of(ObsEvent::doge)) add("doge stamped");
  if (!r.cycle_verdicts.empty() && r.cycle_verdicts.back().holds)
    add(std::string(monitor::to_string(r.cycle_verdicts.back().id)) + " holds");
  if (r.cycle_verdicts.size() > 1) add(std::to_string(r.cycle_verdicts.size()) + " cycles completed");
  for (const auto& v : r.violations) add(std::string(monitor::to_string(v.id)) + " violated");
  if (r.incomplete_cycle) add("IncompleteCycle");
  if (out.empty()) add("no cycle completed");
  return out;
}

}  // namespace

RunResult run(const Scenario& sc, ChoicePolicy& policy, std::uint64_t max_steps,
              const RunOptions& opts) {
  if (max_steps == 0) throw std::invalid_argument("max_steps must be > 0");
  const SimConfig& cfg = sc.config;
  const bool stop_on_violation = opts.stop_on_violation.value_or(sc.stop_on_violation);

  RunResult res;
  res.trace.header.scenario = sc.name;
  res.trace.header.preset = sc.preset;
  res.trace.header.seed = policy.seed();
  res.trace.header.config = cfg;
  res.trace.header.catalog_version = catalog_version();

  SystemState s = preset_state(sc.preset, cfg);
  Recorder rec{res, opts.record_deltas, 0, {}};
  rec.start(s);
  std::size_t next_action = 0;
  std::uint64_t n = 0;
  res.stop = StopReason::Quiescent;

  while (true) {
    if (n >= max_steps) {
      res.stop = StopReason::MaxSteps;
      break;
    }
    const bool q = quiescent(s, cfg);
    std::optional<Event> ev;
    if (next_action < sc.script.size()) {
      const auto& a = sc.script[next_action];
      if (q || (!s.cursor.cycle_started && s.cursor.macro_cycle >= a.cycle)) {
        ++next_action;
        ev = Event::from(a);
        const bool noop = (ev->kind == Event::Kind::HandleUp && s.internals.order == HandleState::hUp) ||
                          (ev->kind == Event::Kind::HandleDown && s.internals.order == HandleState::hDown);
        if (noop) continue;  // the pilot re-selecting the current position does nothing
      }
    }
    if (!ev) {
      if (q) break;
      const auto en = enabled_events(s, s.cursor.phase, cfg);
      ev = Event::of(policy.choose(en));
    }
    SystemState next = fire(s, *ev, cfg);
    rec.record(n, *ev, next);
    s = std::move(next);
    const bool bad = rec.check(n, *ev, s);
    ++n;
    if (bad && stop_on_violation) {
      res.stop = StopReason::Violation;
      break;
    }
  }

  res.final_state = s;
  res.incomplete_cycle = !s.internals.endCycle;
  TraceFooter f;
  f.final_fingerprint = state_fingerprint(s);
  f.stop_reason = std::string(to_string(res.stop));
  f.cycles_completed = res.cycle_verdicts.size();
  f.verdicts = res.violations;
  for (const auto& v : res.cycle_verdicts)
    if (v.holds) f.verdicts.push_back(v);
  if (res.incomplete_cycle) {
    const auto which = s.internals.order == HandleState::hDown ? monitor::Requirement::R11bis
                                                               : monitor::Requirement::R12bis;
    f.verdicts.push_back({which, true, true, "IncompleteCycle", std::nullopt});
  }
  f.summary = summary_of(res);
  res.trace.footer = std::move(f);
  return res;
}

RunResult run(const Scenario& sc, const RunOptions& opts) {
  ChoicePolicy p = sc.policy == ScenarioPolicy::Random ? ChoicePolicy::seeded(sc.seed)
                                                       : ChoicePolicy::interactive();
  return run(sc, p, sc.max_steps, opts);
}

ReplayResult replay(const Trace& t) {
  if (t.header.catalog_version != catalog_version())
    throw CatalogMismatch("trace catalog " + fingerprint_hex(t.header.catalog_version) +
                          " != " + fingerprint_hex(catalog_version()));
  const SimConfig& cfg = t.header.config;
  ReplayResult out;
  SystemState s = preset_state(t.header.preset, cfg);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const auto& r = t.records[i];
    auto diverge = [&](std::string why) {
      out.ok = false;
      out.divergence_step = r.step;
      out.detail = "step " + std::to_string(r.step) + ": " + std::move(why);
      out.final_state = s;
      return out;
    };
    Event e;
    try {
      e = parse_event(r.event);
      s = fire(s, e, cfg);
    } catch (const TraceFormatError&) {
      throw;
    } catch (const std::exception& ex) {
      return diverge(ex.what());
    }
    const auto fp = state_fingerprint(s);
    if (fp != r.fingerprint)
      return diverge("fingerprint " + fingerprint_hex(fp) + " != recorded " +
                     fingerprint_hex(r.fingerprint));
  }
  if (t.footer && !t.records.empty() && t.footer->final_fingerprint != state_fingerprint(s)) {
    out.ok = false;
    out.divergence_step = t.records.back().step;
    out.detail = "final fingerprint mismatch";
  }
  out.final_state = s;
  return out;
}

std::optional<SystemState> replay_events(const SystemState& start, const std::vector<Event>& events,
                                         const SimConfig& cfg) {
  SystemState s = start;
  for (const auto& e : events) {
    try {
      s = fire(s, e, cfg);
    } catch (const std::logic_error&) {
      return std::nullopt;
    } catch (const NoOpHandleMove&) {
      return std::nullopt;
    }
  }
  return s;
}

}  // namespace lgs::kernel
