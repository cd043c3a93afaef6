#include "lgs/plant.hpp"

#include <algorithm>

namespace lgs::plant {

using DS = DoorPhysState;
using GS = GearPhysState;

DoorEdgeDef edge_def(DoorEdge e) {
  switch (e) {
    case DoorEdge::cl2cu: return {DS::ClosedLocked, DS::ClosedUnlocked};
    case DoorEdge::cu2ou: return {DS::ClosedUnlocked, DS::OpenUnlocked};
    case DoorEdge::ou2cu: return {DS::OpenUnlocked, DS::ClosedUnlocked};
    case DoorEdge::cu2cl: return {DS::ClosedUnlocked, DS::ClosedLocked};
  }
  return {};
}

GearEdgeDef edge_def(GearEdge e) {
  switch (e) {
    case GearEdge::rl2ru: return {GS::RetractedLocked, GS::RetractedUnlocked};
    case GearEdge::ru2eu: return {GS::RetractedUnlocked, GS::ExtendedUnlocked};
    case GearEdge::eu2el: return {GS::ExtendedUnlocked, GS::ExtendedLocked};
    case GearEdge::el2eu: return {GS::ExtendedLocked, GS::ExtendedUnlocked};
    case GearEdge::eu2ru: return {GS::ExtendedUnlocked, GS::RetractedUnlocked};
    case GearEdge::ru2rl: return {GS::RetractedUnlocked, GS::RetractedLocked};
  }
  return {};
}

std::string_view to_string(DoorEdge e) {
  constexpr std::array<std::string_view, 4> n{"cl2cu", "cu2ou", "ou2cu", "cu2cl"};
  return n[idx(e)];
}

std::string_view to_string(GearEdge e) {
  constexpr std::array<std::string_view, 6> n{"rl2ru", "ru2eu", "eu2el", "el2eu", "eu2ru", "ru2rl"};
  return n[idx(e)];
}

bool edge_driven(DoorEdge e, const OrderOutputs& o) {
  if (!o.general_EV) return false;
  switch (e) {
    case DoorEdge::cl2cu:
    case DoorEdge::cu2ou: return o.open_EV;
    case DoorEdge::ou2cu:
    case DoorEdge::cu2cl: return o.close_EV;
  }
  return false;
}

bool edge_driven(GearEdge e, const OrderOutputs& o) {
  if (!o.general_EV) return false;
  switch (e) {
    case GearEdge::rl2ru:
    case GearEdge::ru2eu:
    case GearEdge::eu2el: return o.extend_EV;
    default: return o.retract_EV;
  }
}

bool is_door_edge(DoorPhysState from, DoorPhysState to) {
  return std::any_of(kDoorEdges.begin(), kDoorEdges.end(), [&](DoorEdge e) {
    auto d = edge_def(e);
    return d.from == from && d.to == to;
  });
}

bool is_gear_edge(GearPhysState from, GearPhysState to) {
  return std::any_of(kGearEdges.begin(), kGearEdges.end(), [&](GearEdge e) {
    auto d = edge_def(e);
    return d.from == from && d.to == to;
  });
}

std::optional<PlantState> door_transition(const PlantState& s, const OrderOutputs& o) {
  for (auto e : kDoorEdges) {
    auto d = edge_def(e);
    if (!edge_driven(e, o)) continue;
    if (!std::all_of(s.doorState.begin(), s.doorState.end(), [&](DS x) { return x == d.from; }))
      continue;
    PlantState next = s;
    next.doorState.fill(d.to);
    return next;
  }
  return std::nullopt;
}

std::optional<PlantState> gear_transition(const PlantState& s, const OrderOutputs& o) {
  for (auto e : kGearEdges) {
    auto d = edge_def(e);
    if (!edge_driven(e, o)) continue;
    if (!std::all_of(s.gearState.begin(), s.gearState.end(), [&](GS x) { return x == d.from; }))
      continue;
    PlantState next = s;
    next.gearState.fill(d.to);
    return next;
  }
  return std::nullopt;
}

PlantState switch_transition(const PlantState& s, bool handle_moved, bool cycle_ended) {
  PlantState next = s;
  if (handle_moved)
    next.analogical_switch = SwitchState::closedSW;
  else if (cycle_ended)
    next.analogical_switch = SwitchState::openSW;
  return next;
}

Raw truth(const PlantState& s, SensorName sensor, int device) {
  switch (sensor) {
    case SensorName::handle: return static_cast<Raw>(s.pilot_handle);
    case SensorName::analogical_switch: return static_cast<Raw>(s.analogical_switch);
    case SensorName::gear_extended: return s.gearState[device] == GS::ExtendedLocked;
    case SensorName::gear_retracted: return s.gearState[device] == GS::RetractedLocked;
    case SensorName::door_closed: return s.doorState[device] == DS::ClosedLocked;
    case SensorName::door_open: return s.doorState[device] == DS::OpenUnlocked;
  }
  return 0;
}

Raw channel_reading(const PlantState& s, SensorName sensor, int channel, int device,
                    std::uint32_t macro_cycle) {
  const Raw t = truth(s, sensor, device);
  for (const auto& f : s.faults) {
    if (f.sensor != sensor || f.channel.index() != channel || f.device_index() != device) continue;
    if (macro_cycle < f.from_step) continue;
    switch (f.mode) {
      case FaultMode::StuckWrong: return t ? 0 : 1;
      case FaultMode::StuckTrue: return 1;
      case FaultMode::StuckFalse: return 0;
    }
  }
  return t;
}

SensedInputs sense_only(const PlantState& s, std::uint32_t macro_cycle,
                        const SensedInputs& current, std::span<const SensorName> sensors) {
  SensedInputs out = current;
  for (auto sn : sensors)
    for (int ch = 0; ch < kChannels; ++ch)
      for (int d = 0; d < device_count(sn); ++d)
        out.set(sn, ch, d, channel_reading(s, sn, ch, d, macro_cycle));
  return out;
}

SensedInputs sense(const PlantState& s, std::uint32_t macro_cycle) {
  return sense_only(s, macro_cycle, SensedInputs{}, kAllSensors);
}

}  // namespace lgs::plant
