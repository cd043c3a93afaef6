#include "lgs/types.hpp"

namespace lgs {

namespace {

template <class E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  return std::nullopt;
}

constexpr std::array<std::string_view, 2> kHandleNames{"hDown", "hUp"};
constexpr std::array<std::string_view, 2> kSwitchNames{"openSW", "closedSW"};
constexpr std::array<std::string_view, 3> kDoorNames{"FD", "RD", "LD"};
constexpr std::array<std::string_view, 3> kGearNames{"FG", "LG", "RG"};
constexpr std::array<std::string_view, 3> kDoorStateNames{"ClosedLocked", "ClosedUnlocked",
                                                          "OpenUnlocked"};
constexpr std::array<std::string_view, 4> kGearStateNames{"RetractedLocked", "RetractedUnlocked",
                                                          "ExtendedUnlocked", "ExtendedLocked"};
constexpr std::array<std::string_view, 2> kLightNames{"lightOFF", "lightON"};
constexpr std::array<std::string_view, 4> kObsNames{"downH", "upH", "dcge", "doge"};
constexpr std::array<std::string_view, 6> kSensorNames{
    "handle", "analogical_switch", "gear_extended", "gear_retracted", "door_closed", "door_open"};
constexpr std::array<std::string_view, 3> kFaultModeNames{"StuckWrong", "StuckTrue", "StuckFalse"};
constexpr std::array<std::string_view, 4> kMutantNames{"DropDoorGuardOnExtend",
                                                       "DropGeneralEVGuard", "SwapMergeToAND",
                                                       "SkipSpawn"};
constexpr std::array<std::string_view, 4> kMutantFlags{"drop-door-guard", "drop-general-ev-guard",
                                                       "swap-merge-to-and", "skip-spawn"};
constexpr std::array<std::string_view, 3> kPhaseNames{"sense", "decision", "order"};

}  // namespace

std::string_view to_string(HandleState v) { return kHandleNames[idx(v)]; }
std::string_view to_string(SwitchState v) { return kSwitchNames[idx(v)]; }
std::string_view to_string(DoorId v) { return kDoorNames[idx(v)]; }
std::string_view to_string(GearId v) { return kGearNames[idx(v)]; }
std::string_view to_string(DoorPhysState v) { return kDoorStateNames[idx(v)]; }
std::string_view to_string(GearPhysState v) { return kGearStateNames[idx(v)]; }
std::string_view to_string(Light v) { return kLightNames[idx(v)]; }
std::string_view to_string(ObsEvent v) { return kObsNames[idx(v)]; }
std::string_view to_string(SensorName v) { return kSensorNames[idx(v)]; }
std::string_view to_string(FaultMode v) { return kFaultModeNames[idx(v)]; }
std::string_view to_string(MutantId v) { return kMutantNames[idx(v)]; }
std::string_view to_string(Phase v) { return kPhaseNames[idx(v)]; }
std::string_view mutant_flag(MutantId v) { return kMutantFlags[idx(v)]; }

std::optional<HandleState> parse_handle_state(std::string_view s) {
  return lookup<HandleState>(s, kHandleNames);
}
std::optional<DoorId> parse_door(std::string_view s) { return lookup<DoorId>(s, kDoorNames); }
std::optional<GearId> parse_gear(std::string_view s) { return lookup<GearId>(s, kGearNames); }
std::optional<SensorName> parse_sensor(std::string_view s) {
  return lookup<SensorName>(s, kSensorNames);
}
std::optional<FaultMode> parse_fault_mode(std::string_view s) {
  return lookup<FaultMode>(s, kFaultModeNames);
}
std::optional<MutantId> parse_mutant(std::string_view s) {
  if (auto m = lookup<MutantId>(s, kMutantNames)) return m;
  return lookup<MutantId>(s, kMutantFlags);
}

}  // namespace lgs
