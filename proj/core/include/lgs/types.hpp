#pragma once

// Enumerated domain of the landing-gear model: device identifiers, physical
// automaton states, sensor families, and the names they carry on the wire.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace lgs {

inline constexpr int kChannels = 3;
inline constexpr int kDoors = 3;
inline constexpr int kGears = 3;
inline constexpr int kModules = 2;
inline constexpr int kSensors = 6;
inline constexpr int kObsEvents = 4;

enum class HandleState : std::uint8_t { hDown, hUp };
enum class SwitchState : std::uint8_t { openSW, closedSW };
enum class DoorId : std::uint8_t { FD, RD, LD };
enum class GearId : std::uint8_t { FG, LG, RG };

// notOpenLocked / notOpenNotLocked (door event vocabulary) alias the first two.
enum class DoorPhysState : std::uint8_t { ClosedLocked, ClosedUnlocked, OpenUnlocked };
enum class GearPhysState : std::uint8_t {
  RetractedLocked,
  RetractedUnlocked,
  ExtendedUnlocked,
  ExtendedLocked
};

enum class Light : std::uint8_t { lightOFF, lightON };
enum class ObsEvent : std::uint8_t { downH, upH, dcge, doge };

// Triplicated sensor families. handle and analogical_switch have a single
// device; the four position sensors are indexed by door or gear.
enum class SensorName : std::uint8_t {
  handle,
  analogical_switch,
  gear_extended,
  gear_retracted,
  door_closed,
  door_open
};

enum class FaultMode : std::uint8_t { StuckWrong, StuckTrue, StuckFalse };

enum class MutantId : std::uint8_t {
  DropDoorGuardOnExtend,
  DropGeneralEVGuard,
  SwapMergeToAND,
  SkipSpawn
};

enum class Phase : std::uint8_t { Sense, Decision, Order };

/// 1-based channel number of a triplicated sensor.
class ChannelId {
 public:
  constexpr ChannelId() = default;
  constexpr explicit ChannelId(int v) : v_(v) {
    if (v < 1 || v > kChannels) throw std::out_of_range("channel must be 1..3");
  }
  constexpr int value() const { return v_; }
  constexpr int index() const { return v_ - 1; }
  friend constexpr bool operator==(ChannelId, ChannelId) = default;
  friend constexpr auto operator<=>(ChannelId, ChannelId) = default;

 private:
  int v_ = 1;
};

/// 1-based computing module number.
class ModuleId {
 public:
  constexpr ModuleId() = default;
  constexpr explicit ModuleId(int v) : v_(v) {
    if (v < 1 || v > kModules) throw std::out_of_range("module must be 1..2");
  }
  constexpr int value() const { return v_; }
  constexpr int index() const { return v_ - 1; }
  friend constexpr bool operator==(ModuleId, ModuleId) = default;
  friend constexpr auto operator<=>(ModuleId, ModuleId) = default;

 private:
  int v_ = 1;
};

using DeviceRef = std::variant<std::monostate, DoorId, GearId>;

constexpr bool is_per_device(SensorName s) {
  return s != SensorName::handle && s != SensorName::analogical_switch;
}
constexpr bool is_door_sensor(SensorName s) {
  return s == SensorName::door_closed || s == SensorName::door_open;
}
constexpr bool is_gear_sensor(SensorName s) {
  return s == SensorName::gear_extended || s == SensorName::gear_retracted;
}
constexpr int device_count(SensorName s) { return is_per_device(s) ? 3 : 1; }

constexpr HandleState opposite(HandleState h) {
  return h == HandleState::hDown ? HandleState::hUp : HandleState::hDown;
}

template <class E>
constexpr int idx(E e) {
  return static_cast<int>(e);
}

inline constexpr std::array<DoorId, 3> kAllDoors{DoorId::FD, DoorId::RD, DoorId::LD};
inline constexpr std::array<GearId, 3> kAllGears{GearId::FG, GearId::LG, GearId::RG};
inline constexpr std::array<SensorName, 6> kAllSensors{
    SensorName::handle,         SensorName::analogical_switch, SensorName::gear_extended,
    SensorName::gear_retracted, SensorName::door_closed,       SensorName::door_open};
inline constexpr std::array<MutantId, 4> kAllMutants{
    MutantId::DropDoorGuardOnExtend, MutantId::DropGeneralEVGuard, MutantId::SwapMergeToAND,
    MutantId::SkipSpawn};

std::string_view to_string(HandleState v);
std::string_view to_string(SwitchState v);
std::string_view to_string(DoorId v);
std::string_view to_string(GearId v);
std::string_view to_string(DoorPhysState v);
std::string_view to_string(GearPhysState v);
std::string_view to_string(Light v);
std::string_view to_string(ObsEvent v);
std::string_view to_string(SensorName v);
std::string_view to_string(FaultMode v);
std::string_view to_string(MutantId v);
std::string_view to_string(Phase v);

/// Kebab-case CLI spelling of a mutant (drop-door-guard, ...).
std::string_view mutant_flag(MutantId v);

// Parsers return nullopt on unknown names.
std::optional<HandleState> parse_handle_state(std::string_view s);
std::optional<DoorId> parse_door(std::string_view s);
std::optional<GearId> parse_gear(std::string_view s);
std::optional<SensorName> parse_sensor(std::string_view s);
std::optional<FaultMode> parse_fault_mode(std::string_view s);
std::optional<MutantId> parse_mutant(std::string_view s);  // accepts both spellings

}  // namespace lgs
