#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "lgs/types.hpp"

namespace lgs {

// Sensor values are carried as 0/1 so that voting and fault injection can
// treat every family uniformly: hDown=0/hUp=1, openSW=0/closedSW=1.
using Raw = std::uint8_t;

template <class T>
using PerChannel = std::array<T, kChannels>;
using BoolGrid = std::array<std::array<bool, 3>, kChannels>;  // [channel][device]

struct SensedInputs {
  PerChannel<HandleState> handle{};
  PerChannel<SwitchState> analogical_switch{};
  BoolGrid gear_extended{};
  BoolGrid gear_retracted{};
  BoolGrid door_closed{};
  BoolGrid door_open{};

  Raw get(SensorName s, int channel, int device) const;
  void set(SensorName s, int channel, int device, Raw v);

  bool operator==(const SensedInputs&) const = default;
};

/// The controller's trusted reading of each sensed quantity after voting.
struct VotedView {
  HandleState handle = HandleState::hDown;
  SwitchState analogical_switch = SwitchState::openSW;
  std::array<bool, 3> gear_extended{};
  std::array<bool, 3> gear_retracted{};
  std::array<bool, 3> door_closed{};
  std::array<bool, 3> door_open{};

  Raw get(SensorName s, int device) const;
  void set(SensorName s, int device, Raw v);

  bool all_gears_extended() const;
  bool all_gears_retracted() const;
  bool all_doors_open() const;
  bool all_doors_closed() const;
  bool no_door_closed() const;

  bool operator==(const VotedView&) const = default;
};

struct OrderOutputs {
  bool general_EV = false;
  bool open_EV = false;
  bool close_EV = false;
  bool extend_EV = false;
  bool retract_EV = false;

  bool any_maneuver() const { return open_EV || close_EV || extend_EV || retract_EV; }
  bool operator==(const OrderOutputs&) const = default;
};

struct StateOutputs {
  bool gears_locked_down = false;
  bool gears_maneuvering = false;
  bool anomaly = false;
  Light greenLight = Light::lightOFF;
  Light orangeLight = Light::lightOFF;
  Light redLight = Light::lightOFF;

  bool operator==(const StateOutputs&) const = default;
};

struct ControllerInternals {
  HandleState order = HandleState::hDown;
  std::uint8_t nextOGseq = 0;  // 0 = no outgoing step pending, else 1..8
  std::uint8_t nextRTseq = 0;
  bool endCycle = true;
  std::array<PerChannel<bool>, kSensors> channel_valid{};
  std::array<PerChannel<std::uint8_t>, kSensors> disagree_count{};
  VotedView voted{};
  bool anomaly_armed = false;

  int valid_count(SensorName s) const;
  bool operator==(const ControllerInternals&) const = default;
};

struct KIndexedState {
  std::array<SensedInputs, kModules> k_inputs{};
  std::array<OrderOutputs, kModules> k_orders{};
  std::array<StateOutputs, kModules> k_state_outputs{};
  std::array<std::uint8_t, kModules> k_nextOGseq{};
  std::array<std::uint8_t, kModules> k_nextRTseq{};
  std::array<bool, kModules> k_endCycle{};
  std::array<bool, kModules> k_stepped{};  // one sequence step per module per macro-cycle
  std::array<bool, kModules> silent{};     // module-failure injection: outputs forced FALSE

  bool operator==(const KIndexedState&) const = default;
};

struct FaultSpec {
  SensorName sensor = SensorName::handle;
  ChannelId channel{};
  DeviceRef device{};
  FaultMode mode = FaultMode::StuckWrong;
  std::uint32_t from_step = 0;  // macro-cycle from which the fault is active

  int device_index() const;  // 0 for single-device sensors
  void validate() const;     // throws std::invalid_argument

  bool operator==(const FaultSpec&) const = default;
  auto operator<=>(const FaultSpec& o) const {
    return std::tuple(idx(sensor), channel.value(), device.index(), device_index(), idx(mode),
                      from_step) <=> std::tuple(idx(o.sensor), o.channel.value(),
                                                o.device.index(), o.device_index(), idx(o.mode),
                                                o.from_step);
  }
};

/// Text form used by scenario files and --faults: sensor:channel[:device]:mode[@from].
std::string to_string(const FaultSpec& f);
FaultSpec parse_fault(std::string_view text);  // throws std::invalid_argument

struct PlantState {
  std::array<DoorPhysState, kDoors> doorState{};
  std::array<GearPhysState, kGears> gearState{};
  SwitchState analogical_switch = SwitchState::openSW;
  HandleState pilot_handle = HandleState::hDown;
  std::vector<FaultSpec> faults;  // sorted, no duplicates

  void add_fault(const FaultSpec& f);
  bool operator==(const PlantState&) const = default;
};

/// Scheduler bookkeeping carried inside the state so that a state value fully
/// determines which events are enabled.
struct KernelCursor {
  Phase phase = Phase::Sense;
  std::uint32_t macro_cycle = 0;
  bool cycle_started = false;  // some event already fired in this macro-cycle
  bool voted = false;          // vote_health fired in this macro-cycle
  bool inputs_dirty = false;   // inputs changed since the last spawn
  bool outputs_dirty = false;  // module outputs changed since the last merge
  std::array<bool, kDoors> door_moved{};
  std::array<bool, kGears> gear_moved{};

  bool operator==(const KernelCursor&) const = default;
};

struct SystemState {
  PlantState plant;
  SensedInputs inputs;
  ControllerInternals internals;
  KIndexedState kstate;
  OrderOutputs orders;
  StateOutputs outputs;
  std::uint64_t llc = 0;
  std::array<std::optional<std::uint64_t>, kObsEvents> ldate{};
  KernelCursor cursor;

  std::optional<std::uint64_t> stamp_of(ObsEvent e) const { return ldate[idx(e)]; }
  bool operator==(const SystemState&) const = default;
};

struct SimConfig {
  bool interleaved = false;  // per-device door/gear stepping
  int vote_threshold = 1;
  std::optional<MutantId> mutant;

  bool has(MutantId m) const { return mutant && *mutant == m; }
  std::uint64_t hash() const;
  bool operator==(const SimConfig&) const = default;
};

SystemState initial_state();

enum class FingerprintMode : std::uint8_t { Monitor, Explorer };

/// FNV-1a over the canonical byte encoding. Explorer mode drops the logical
/// clock and stamp values (keeping which observations are stamped) and clamps
/// the macro-cycle counter to the latest fault activation.
std::uint64_t state_fingerprint(const SystemState& s,
                                FingerprintMode mode = FingerprintMode::Monitor);

std::string fingerprint_hex(std::uint64_t fp);

/// One entry of the canonical flat record: key and JSON-encoded value.
using FlatRecord = std::vector<std::pair<std::string, std::string>>;

/// Field order is fixed; see docs/serialization.md.
FlatRecord flatten(const SystemState& s);
std::string to_json(const FlatRecord& r);
/// Entries of `after` whose value differs from `before` (same key order).
FlatRecord diff(const FlatRecord& before, const FlatRecord& after);

}  // namespace lgs
