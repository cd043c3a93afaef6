#pragma once

// Physical environment: door and gear automata driven by the electro-valve
// orders, the analogical switch, and the triplicated micro-sensors.

#include <optional>
#include <span>

#include "lgs/state.hpp"

namespace lgs::plant {

enum class DoorEdge : std::uint8_t { cl2cu, cu2ou, ou2cu, cu2cl };
enum class GearEdge : std::uint8_t { rl2ru, ru2eu, eu2el, el2eu, eu2ru, ru2rl };

inline constexpr std::array<DoorEdge, 4> kDoorEdges{DoorEdge::cl2cu, DoorEdge::cu2ou,
                                                     DoorEdge::ou2cu, DoorEdge::cu2cl};
inline constexpr std::array<GearEdge, 6> kGearEdges{GearEdge::rl2ru, GearEdge::ru2eu,
                                                     GearEdge::eu2el, GearEdge::el2eu,
                                                     GearEdge::eu2ru, GearEdge::ru2rl};

struct DoorEdgeDef {
  DoorPhysState from, to;
};
struct GearEdgeDef {
  GearPhysState from, to;
};

DoorEdgeDef edge_def(DoorEdge e);
GearEdgeDef edge_def(GearEdge e);
std::string_view to_string(DoorEdge e);
std::string_view to_string(GearEdge e);

/// True when the valve orders drive this edge. Maneuvering valves have no
/// effect without general_EV (hydraulic supply gating).
bool edge_driven(DoorEdge e, const OrderOutputs& o);
bool edge_driven(GearEdge e, const OrderOutputs& o);

/// True when `from -> to` is an edge of the door (gear) automaton.
bool is_door_edge(DoorPhysState from, DoorPhysState to);
bool is_gear_edge(GearPhysState from, GearPhysState to);

/// Synchronized door step: all three doors share the source state of a
/// driven edge and move together. nullopt = NoChange.
std::optional<PlantState> door_transition(const PlantState& s, const OrderOutputs& o);
std::optional<PlantState> gear_transition(const PlantState& s, const OrderOutputs& o);

PlantState switch_transition(const PlantState& s, bool handle_moved, bool cycle_ended);

/// Ground truth a healthy micro-sensor reports for (sensor, device).
Raw truth(const PlantState& s, SensorName sensor, int device);

/// Value written by channel `channel` of (sensor, device) at `macro_cycle`,
/// applying the first active matching fault.
Raw channel_reading(const PlantState& s, SensorName sensor, int channel, int device,
                    std::uint32_t macro_cycle);

/// One deterministic refresh of every sensor channel.
SensedInputs sense(const PlantState& s, std::uint32_t macro_cycle);

/// Refresh only the listed families, leaving the others as in `current`.
SensedInputs sense_only(const PlantState& s, std::uint32_t macro_cycle,
                        const SensedInputs& current, std::span<const SensorName> sensors);

}  // namespace lgs::plant
