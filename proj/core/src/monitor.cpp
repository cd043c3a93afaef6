#include "lgs/monitor.hpp"

#include <array>

namespace lgs::monitor {

namespace {

constexpr std::array<std::string_view, 11> kNames{"R21", "R22", "R31", "R32",  "R41",   "R42",
                                                  "R51", "ANO", "BIND", "R11bis", "R12bis"};

bool light_binding(const StateOutputs& o) {
  return !o.gears_locked_down || o.greenLight == Light::lightON;
}

bool inputs_bound(const SystemState& s) {
  for (const auto& k : s.kstate.k_inputs)
    if (!(k == s.inputs)) return false;
  return true;
}

bool outputs_bound(const SystemState& s) {
  const auto& ko = s.kstate.k_orders;
  const auto& ks = s.kstate.k_state_outputs;
  auto any = [](auto proj, const auto& arr) {
    bool r = false;
    for (const auto& x : arr) r = r || proj(x);
    return r;
  };
  const auto& o = s.orders;
  const auto& so = s.outputs;
  return o.general_EV == any([](const OrderOutputs& x) { return x.general_EV; }, ko) &&
         o.open_EV == any([](const OrderOutputs& x) { return x.open_EV; }, ko) &&
         o.close_EV == any([](const OrderOutputs& x) { return x.close_EV; }, ko) &&
         o.extend_EV == any([](const OrderOutputs& x) { return x.extend_EV; }, ko) &&
         o.retract_EV == any([](const OrderOutputs& x) { return x.retract_EV; }, ko) &&
         so.gears_locked_down ==
             any([](const StateOutputs& x) { return x.gears_locked_down; }, ks) &&
         so.gears_maneuvering ==
             any([](const StateOutputs& x) { return x.gears_maneuvering; }, ks) &&
         so.anomaly == any([](const StateOutputs& x) { return x.anomaly; }, ks);
}

}  // namespace

std::string_view to_string(Requirement r) { return kNames[idx(r)]; }

std::optional<Requirement> parse_requirement(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == s) return static_cast<Requirement>(i);
  return std::nullopt;
}

RequirementKind kind(Requirement r) {
  return (r == Requirement::R11bis || r == Requirement::R12bis) ? RequirementKind::CyclePredicate
                                                                : RequirementKind::StatePredicate;
}

bool holds(Requirement r, const SystemState& s) {
  const auto& v = s.internals.voted;
  const auto& o = s.orders;
  switch (r) {
    case Requirement::R21:
      return s.internals.order != HandleState::hDown || v.handle != HandleState::hUp;
    case Requirement::R22:
      return s.internals.order != HandleState::hUp || v.handle != HandleState::hDown;
    case Requirement::R31: return !o.extend_EV || v.all_doors_open();
    case Requirement::R32: return !o.retract_EV || v.all_doors_open();
    case Requirement::R41: return !(o.open_EV && o.close_EV);
    case Requirement::R42: return !(o.extend_EV && o.retract_EV);
    case Requirement::R51: return !o.any_maneuver() || o.general_EV;
    case Requirement::ANO: {
      if (s.outputs.anomaly) return true;
      for (int d = 0; d < 3; ++d) {
        if (v.door_closed[d] && v.door_open[d]) return false;
        if (v.gear_extended[d] && v.gear_retracted[d]) return false;
      }
      return true;
    }
    case Requirement::BIND: {
      if (!light_binding(s.outputs)) return false;
      for (const auto& ks : s.kstate.k_state_outputs)
        if (!light_binding(ks)) return false;
      if (!s.cursor.inputs_dirty && !inputs_bound(s)) return false;
      if (!s.cursor.outputs_dirty && !outputs_bound(s)) return false;
      return true;
    }
    case Requirement::R11bis:
    case Requirement::R12bis:
      return check_R1(ObservationLog::of(s), r).holds;
  }
  return true;
}

std::uint16_t failing_mask(const SystemState& s) {
  std::uint16_t mask = 0;
  for (auto r : kStateRequirements)
    if (!holds(r, s)) mask |= static_cast<std::uint16_t>(1u << idx(r));
  return mask;
}

std::vector<Verdict> check_safety(const SystemState& s) {
  std::vector<Verdict> out;
  out.reserve(kStateRequirements.size());
  std::string fp;
  for (auto r : kStateRequirements) {
    Verdict v{r, holds(r, s), false, {}, std::nullopt};
    if (!v.holds) {
      if (fp.empty()) fp = fingerprint_hex(state_fingerprint(s));
      v.witness = fp;
    }
    out.push_back(std::move(v));
  }
  return out;
}

SystemState stamp(ObsEvent obs, const SystemState& s) {
  SystemState next = s;
  next.ldate[idx(obs)] = s.llc;
  return next;
}

Verdict check_R1(const ObservationLog& log, Requirement which) {
  const bool outgoing = which == Requirement::R11bis;
  const ObsEvent end = outgoing ? ObsEvent::dcge : ObsEvent::doge;
  const ObsEvent start = outgoing ? ObsEvent::downH : ObsEvent::upH;
  const ObsEvent abort = outgoing ? ObsEvent::upH : ObsEvent::downH;

  Verdict v{which, true, false, {}, std::nullopt};
  const auto& dj = log.ldate[idx(end)];
  if (!log.endCycle || !dj || *dj >= log.llc) {
    v.incomplete = true;
    return v;
  }
  const auto& di = log.ldate[idx(start)];
  if (!di || *di >= *dj) {
    v.holds = false;
    v.witness = "no " + std::string(lgs::to_string(start)) + " before " +
                std::string(lgs::to_string(end)) + "@" + std::to_string(*dj);
    return v;
  }
  // ldate is injective, so the only event that can sit at ii is the one whose
  // stamp equals ii; only the abort event matters.
  const auto& ab = log.ldate[idx(abort)];
  if (ab && *di <= *ab && *ab < *dj) {
    v.holds = false;
    v.witness = "ii=" + std::to_string(*ab);
  }
  return v;
}

}  // namespace lgs::monitor
