#include "lgs/explorer.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "lgs/errors.hpp"

namespace lgs::explorer {

namespace {

using kernel::Event;
using monitor::Requirement;

constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
constexpr std::int32_t kHandleUpCode = -1;
constexpr std::int32_t kHandleDownCode = -2;

// Path arena entry. Roots keep their setup events separately.
struct Node {
  std::uint32_t parent;
  std::int32_t code;  // catalog index, handle move, or root number
};

struct Item {
  SystemState s;
  std::uint32_t node;
  std::uint32_t depth;
  std::uint32_t pilot_used;
};

struct Succ {
  SystemState s;
  std::uint32_t parent;
  std::int32_t code;
  std::uint32_t pilot_used;
  std::uint64_t key;
  std::uint16_t failing;
  std::optional<monitor::Verdict> r1;  // set after a stamp event
};

struct Expansion {
  std::vector<Succ> succs;
  std::uint64_t quiescent = 0;
  std::uint64_t incomplete = 0;
  bool cut = false;
};

std::uint64_t key_of(const SystemState& s, std::uint32_t pilot_used) {
  const std::uint64_t fp = state_fingerprint(s, FingerprintMode::Explorer);
  return fp ^ (0x9e3779b97f4a7c15ull * (pilot_used + 1));
}

Event decode(std::int32_t code) {
  if (code == kHandleUpCode) return Event::handle(HandleState::hUp);
  if (code == kHandleDownCode) return Event::handle(HandleState::hDown);
  return Event::of(code);
}

Succ make_succ(SystemState next, std::uint32_t parent, std::int32_t code, std::uint32_t pilot) {
  Succ out{std::move(next), parent, code, pilot, 0, 0, std::nullopt};
  out.key = key_of(out.s, pilot);
  out.failing = monitor::failing_mask(out.s);
  if (code >= 0) {
    const auto k = kernel::catalog()[static_cast<std::size_t>(code)].kind;
    if (k == kernel::EventKind::StampDcge || k == kernel::EventKind::StampDoge)
      out.r1 = monitor::check_R1(monitor::ObservationLog::of(out.s),
                                 k == kernel::EventKind::StampDcge ? Requirement::R11bis
                                                                   : Requirement::R12bis);
  }
  return out;
}

void expand(const Item& it, const ExploreConfig& cfg, Expansion& out) {
  const auto& sim = cfg.sim;
  const auto en = kernel::enabled_events(it.s, it.s.cursor.phase, sim);
  const bool q = en.empty();
  if (q) {
    ++out.quiescent;
    if (!it.s.internals.endCycle) ++out.incomplete;
  }
  const bool pilot = it.pilot_used < cfg.pilot_moves_budget &&
                     (!it.s.cursor.cycle_started || q);
  if (it.depth >= cfg.max_depth) {
    if (!en.empty() || pilot) out.cut = true;
    return;
  }
  for (int e : en)
    out.succs.push_back(make_succ(kernel::fire(it.s, Event::of(e), sim), it.node, e, it.pilot_used));
  if (pilot) {
    const bool up = it.s.internals.order == HandleState::hDown;
    const Event h = Event::handle(up ? HandleState::hUp : HandleState::hDown);
    out.succs.push_back(make_succ(kernel::fire(it.s, h, sim), it.node,
                                  up ? kHandleUpCode : kHandleDownCode, it.pilot_used + 1));
  }
}

void subsets(const std::vector<FaultSpec>& pool, std::uint32_t fmax,
             std::vector<std::vector<FaultSpec>>& out) {
  std::vector<FaultSpec> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    out.push_back(cur);
    if (cur.size() == fmax) return;
    for (std::size_t i = start; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

void ExploreConfig::validate() const {
  if (f_max > fault_envelope.size())
    throw std::invalid_argument("f_max exceeds the fault envelope size");
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  for (const auto& f : fault_envelope) f.validate();
}

bool ExploreReport::has(Requirement r) const { return find(r) != nullptr; }

const Counterexample* ExploreReport::find(Requirement r) const {
  for (const auto& c : violations)
    if (c.id == r) return &c;
  return nullptr;
}

ExploreReport explore(const ExploreConfig& cfg) {
  cfg.validate();
  const SimConfig& sim = cfg.sim;
  ExploreReport rep;

  // Roots: one per fault subset, silencing applied first.
  std::vector<std::vector<FaultSpec>> fsets;
  subsets(cfg.fault_envelope, cfg.f_max, fsets);
  std::vector<std::vector<Event>> root_events;
  std::vector<Node> arena;
  std::vector<Item> frontier;
  std::unordered_set<std::uint64_t> visited;
  std::vector<std::optional<Counterexample>> found(monitor::kStateRequirements.size() + 2);

  auto path_of = [&](std::uint32_t node) {
    std::vector<Event> tail;
    std::uint32_t n = node;
    while (arena[n].parent != kNoParent) {
      tail.push_back(decode(arena[n].code));
      n = arena[n].parent;
    }
    std::vector<Event> ev = root_events[static_cast<std::size_t>(arena[n].code)];
    ev.insert(ev.end(), tail.rbegin(), tail.rend());
    return ev;
  };
  auto note = [&](Requirement r, std::uint32_t node, std::uint32_t depth, const SystemState& s) {
    auto& slot = found[idx(r)];
    if (slot) return;
    slot = Counterexample{r, path_of(node), depth,
                          fingerprint_hex(state_fingerprint(s)), cfg.start_preset, sim};
  };
  auto admit = [&](SystemState s, std::uint32_t parent, std::int32_t code, std::uint32_t depth,
                   std::uint32_t pilot, std::uint64_t key, std::uint16_t failing) {
    if (cfg.dedupe && !visited.insert(key).second) return;
    if (rep.states_visited >= cfg.max_states) {
      rep.budget_exceeded = true;
      return;
    }
    ++rep.states_visited;
    rep.max_depth_reached = std::max(rep.max_depth_reached, depth);
    const auto node = static_cast<std::uint32_t>(arena.size());
    arena.push_back({parent, code});
    for (auto r : monitor::kStateRequirements)
      if (failing & (1u << idx(r))) note(r, node, depth, s);
    frontier.push_back({std::move(s), node, depth, pilot});
  };

  const SystemState base = kernel::preset_state(cfg.start_preset, sim);
  for (std::size_t i = 0; i < fsets.size(); ++i) {
    std::vector<Event> setup;
    if (cfg.silent_module) setup.push_back(Event{Event::Kind::SilenceModule, 0, {}, *cfg.silent_module});
    for (const auto& f : fsets[i]) setup.push_back(Event{Event::Kind::InjectFault, 0, f, {}});
    SystemState s = base;
    for (const auto& e : setup) s = kernel::fire(s, e, sim);
    root_events.push_back(std::move(setup));
    const auto key = key_of(s, 0);
    const auto failing = monitor::failing_mask(s);
    admit(std::move(s), kNoParent, static_cast<std::int32_t>(i), 0, 0, key, failing);
  }

  const unsigned workers = std::max(1u, cfg.workers);
  while (!frontier.empty() && !rep.budget_exceeded) {
    std::vector<Item> level;
    level.swap(frontier);

    std::vector<Expansion> parts(std::min<std::size_t>(workers, level.size()));
    auto work = [&](std::size_t w) {
      const std::size_t n = level.size(), k = parts.size();
      for (std::size_t i = n * w / k; i < n * (w + 1) / k; ++i) expand(level[i], cfg, parts[w]);
    };
    if (parts.size() == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < parts.size(); ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }

    // Deterministic merge: parts in frontier order, successors in catalog order.
    for (auto& p : parts) {
      rep.quiescent_states += p.quiescent;
      rep.incomplete_cycle_states += p.incomplete;
      rep.depth_cut = rep.depth_cut || p.cut;
      for (auto& sc : p.succs) {
        ++rep.edges_fired;
        const std::uint32_t depth = level.front().depth + 1;
        if (sc.r1) {
          ++rep.completed_cycles_checked;
          if (!sc.r1->holds) {
            // R1 is a path property: attribute it to this edge even if the
            // target state was already seen along another path.
            arena.push_back({sc.parent, sc.code});
            note(sc.r1->id, static_cast<std::uint32_t>(arena.size() - 1), depth, sc.s);
          }
        }
        admit(std::move(sc.s), sc.parent, sc.code, depth, sc.pilot_used, sc.key, sc.failing);
        if (rep.budget_exceeded) break;
      }
      if (rep.budget_exceeded) break;
    }
  }

  rep.frontier_exhausted = frontier.empty() && !rep.budget_exceeded;
  for (auto& f : found)
    if (f) rep.violations.push_back(std::move(*f));
  std::sort(rep.violations.begin(), rep.violations.end(), [](const auto& a, const auto& b) {
    return std::tuple(idx(a.id), a.depth, a.witness) < std::tuple(idx(b.id), b.depth, b.witness);
  });
  if (rep.incomplete_cycle_states > 0)
    rep.warnings.push_back("IncompleteCycle: " + std::to_string(rep.incomplete_cycle_states) +
                           " quiescent state(s) with endCycle = FALSE");
  if (rep.budget_exceeded)
    rep.warnings.push_back("FrontierBudgetExceeded: stopped after " +
                           std::to_string(rep.states_visited) + " states");
  if (rep.depth_cut) rep.warnings.push_back("depth bound reached before the frontier emptied");
  return rep;
}

// ---- counterexamples -------------------------------------------------------------

namespace {

bool violated(const Counterexample& c, const SystemState& s, const Event& last) {
  if (monitor::kind(c.id) == monitor::RequirementKind::StatePredicate) return !monitor::holds(c.id, s);
  if (last.kind != Event::Kind::Catalog) return false;
  const auto k = kernel::catalog()[static_cast<std::size_t>(last.index)].kind;
  const bool matches = (c.id == Requirement::R11bis && k == kernel::EventKind::StampDcge) ||
                       (c.id == Requirement::R12bis && k == kernel::EventKind::StampDoge);
  return matches && !monitor::check_R1(monitor::ObservationLog::of(s), c.id).holds;
}

std::optional<std::size_t> first_violation(const Counterexample& c, const std::vector<Event>& ev) {
  SystemState s = kernel::preset_state(c.preset, c.sim);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    try {
      s = kernel::fire(s, ev[i], c.sim);
    } catch (const std::logic_error&) {
      return std::nullopt;
    } catch (const NoOpHandleMove&) {
      return std::nullopt;
    }
    if (violated(c, s, ev[i])) return i;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> violation_index(const Counterexample& c) {
  return first_violation(c, c.events);
}

Counterexample minimize(const Counterexample& c) {
  auto at = first_violation(c, c.events);
  if (!at) throw NotReproducible("counterexample for " + std::string(monitor::to_string(c.id)) +
                                 " does not reproduce");
  Counterexample out = c;
  out.events.resize(*at + 1);
  for (std::size_t i = out.events.size(); i-- > 0;) {
    std::vector<Event> shorter = out.events;
    shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(i));
    if (auto j = first_violation(out, shorter)) {
      shorter.resize(*j + 1);
      out.events = std::move(shorter);
      i = std::min(i, out.events.size());
    }
  }
  SystemState s = kernel::preset_state(out.preset, out.sim);
  for (const auto& e : out.events) s = kernel::fire(s, e, out.sim);
  out.witness = fingerprint_hex(state_fingerprint(s));
  return out;
}

Trace to_trace(const Counterexample& c) {
  Trace t;
  t.header.scenario = "counterexample-" + std::string(monitor::to_string(c.id));
  t.header.preset = c.preset;
  t.header.config = c.sim;
  t.header.catalog_version = kernel::catalog_version();
  SystemState s = kernel::preset_state(c.preset, c.sim);
  FlatRecord last = flatten(s);
  std::uint64_t step = 0;
  for (const auto& e : c.events) {
    s = kernel::fire(s, e, c.sim);
    FlatRecord now = flatten(s);
    t.records.push_back({step++, kernel::to_string(e), s.llc, state_fingerprint(s), diff(last, now)});
    last = std::move(now);
  }
  TraceFooter f;
  f.final_fingerprint = state_fingerprint(s);
  f.stop_reason = "violation";
  f.verdicts.push_back({c.id, false, false, c.witness,
                        c.events.empty() ? std::nullopt : std::optional<std::uint64_t>(step - 1)});
  f.summary = std::string(monitor::to_string(c.id)) + " violated";
  t.footer = std::move(f);
  return t;
}

std::string report_json(const ExploreReport& r, const ExploreConfig& cfg) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["schema"] = 1;
  if (cfg.sim.mutant)
    j["watermark"] = "MUTANT " + std::string(mutant_flag(*cfg.sim.mutant)) + ": not nominal evidence";
  Json c;
  c["max_depth"] = cfg.max_depth;
  c["pilot_moves_budget"] = cfg.pilot_moves_budget;
  Json env = Json::array();
  for (const auto& f : cfg.fault_envelope) env.push_back(to_string(f));
  c["fault_envelope"] = std::move(env);
  c["f_max"] = cfg.f_max;
  c["silent_module"] = cfg.silent_module ? Json(cfg.silent_module->value()) : Json(nullptr);
  c["start_preset"] = cfg.start_preset;
  c["mutant"] = cfg.sim.mutant ? Json(std::string(mutant_flag(*cfg.sim.mutant))) : Json(nullptr);
  c["interleaved"] = cfg.sim.interleaved;
  c["vote_threshold"] = cfg.sim.vote_threshold;
  c["dedupe"] = cfg.dedupe;
  c["max_states"] = cfg.max_states;
  j["config"] = std::move(c);
  j["states_visited"] = r.states_visited;
  j["edges_fired"] = r.edges_fired;
  j["max_depth_reached"] = r.max_depth_reached;
  j["quiescent_states"] = r.quiescent_states;
  j["incomplete_cycle_states"] = r.incomplete_cycle_states;
  j["completed_cycles_checked"] = r.completed_cycles_checked;
  j["frontier"] = !r.frontier_exhausted ? "FrontierBudgetExceeded"
                  : r.depth_cut        ? "frontier exhausted (depth-bounded)"
                                       : "frontier exhausted";
  Json vs = Json::array();
  for (const auto& v : r.violations) {
    Json x;
    x["requirement"] = std::string(monitor::to_string(v.id));
    x["depth"] = v.depth;
    x["witness"] = v.witness;
    Json evs = Json::array();
    for (const auto& e : v.events) evs.push_back(kernel::to_string(e));
    x["events"] = std::move(evs);
    vs.push_back(std::move(x));
  }
  j["violations"] = std::move(vs);
  j["warnings"] = r.warnings;
  return j.dump(2);
}

std::vector<FaultSpec> all_single_channel_faults(FaultMode mode, std::uint32_t from_step) {
  std::vector<FaultSpec> out;
  for (auto sensor : kAllSensors)
    for (int ch = 1; ch <= kChannels; ++ch) {
      auto push = [&](DeviceRef d) { out.push_back({sensor, ChannelId(ch), d, mode, from_step}); };
      if (is_door_sensor(sensor))
        for (auto d : kAllDoors) push(d);
      else if (is_gear_sensor(sensor))
        for (auto g : kAllGears) push(g);
      else
        push(std::monostate{});
    }
  return out;
}

}  // namespace lgs::explorer
