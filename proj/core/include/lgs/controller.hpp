#pragma once

// Digital part: channel voting, the two redundant computing modules with
// their outgoing/retraction sequencers and monitoring events, the OR merge of
// module outputs, and the pilot handle reaction.

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lgs/state.hpp"

namespace lgs::controller {

// ---- voting -------------------------------------------------------------------

enum class VoteStatus : std::uint8_t { Decided, NoDecision, AllChannelsInvalid };

struct VoteResult {
  VoteStatus status = VoteStatus::AllChannelsInvalid;
  Raw value = 0;                      // meaningful only when Decided
  std::array<bool, 3> valid_channels{};
  std::array<bool, 3> dissent{};      // channels flagged by this vote
  bool unanimous = false;
};

/// Majority over the valid channels. Two valid channels that disagree give
/// NoDecision and flag both; the caller keeps its previous value.
VoteResult vote3(Raw a, Raw b, Raw c, std::array<bool, 3> validity);

using DissentFlags = std::array<std::array<bool, kChannels>, kSensors>;
using SensorMask = std::array<bool, kSensors>;

inline constexpr SensorMask kAllSensorsMask{true, true, true, true, true, true};

/// Dissenting channels count up and are invalidated at `threshold`; agreeing
/// channels reset to 0. Only sensors in `mask` are touched. anomaly_armed
/// latches once any sensor is down to one valid channel.
ControllerInternals update_channel_health(const ControllerInternals& in,
                                          const DissentFlags& dissent, int threshold,
                                          const SensorMask& mask = kAllSensorsMask);

struct VoteOutcome {
  VotedView view;
  DissentFlags dissent{};
};

VoteOutcome vote_inputs(const SensedInputs& inputs, const ControllerInternals& in,
                        const SensorMask& mask = kAllSensorsMask);

/// vote_inputs followed by update_channel_health.
ControllerInternals apply_vote(const ControllerInternals& in, const SensedInputs& inputs,
                               int threshold, const SensorMask& mask = kAllSensorsMask);

/// What module m believes after voting its own spawned copy of the inputs.
VotedView module_view(const SensedInputs& k_inputs, const ControllerInternals& in);

// ---- spawn / merge ------------------------------------------------------------

KIndexedState spawn_inputs(const SensedInputs& global, const KIndexedState& k,
                           const SimConfig& cfg = {});

/// Logical OR of every boolean order and state output (AND under the
/// SwapMergeToAND mutant); lights follow the merged booleans.
std::pair<OrderOutputs, StateOutputs> merge_outputs(const KIndexedState& k,
                                                    const SimConfig& cfg = {});

Light light_for(bool on);

// ---- sequences ----------------------------------------------------------------

enum class Valve : std::uint8_t { general, open, close, extend, retract };

struct SequenceStep {
  std::string_view name;
  Valve valve;
  bool value;
};

inline constexpr int kSequenceLength = 8;

/// Outgoing table for hDown, retraction table for hUp.
const std::array<SequenceStep, kSequenceLength>& sequence_table(HandleState direction);

struct ResumeEntry {
  std::uint8_t step;        // where the new sequence resumes
  bool cut_gear_valve;      // interrupted mid-gear-travel: drop the old gear valve
  bool cut_close_valve;     // interrupted mid-door-closure: drop close_EV
};

/// Resume point of the new sequence given the interrupted sequence's pending
/// step (0 = no sequence active). Same table for both directions.
ResumeEntry resume_step(std::uint8_t interrupted_step);

bool valve(const OrderOutputs& o, Valve v);
void set_valve(OrderOutputs& o, Valve v, bool value);

// ---- module events ------------------------------------------------------------

// 0..7 outgoing steps, 8..15 retraction steps, then the monitoring events.
inline constexpr int kSeqEvents = 16;
inline constexpr int kMonGearsLockedDown = 16;
inline constexpr int kMonGearsUnlocked = 17;
inline constexpr int kMonManeuvering = 18;
inline constexpr int kMonManeuverStopped = 19;
inline constexpr int kMonAnomaly = 20;
inline constexpr int kModuleEvents = 21;

std::string_view module_event_name(int ev);

bool module_event_enabled(const SystemState& s, ModuleId m, int ev, const SimConfig& cfg = {});

/// Applies the event's action. Precondition: module_event_enabled.
void fire_module_event(SystemState& s, ModuleId m, int ev);

/// Fires at most one enabled sequence event for module m, then every enabled
/// monitoring event. Returns the fired event ids.
std::vector<int> module_step(SystemState& s, ModuleId m, const SimConfig& cfg = {});

/// Pilot moves the handle: order, sequence inversion, handle/switch sensing,
/// and the downH/upH stamp. Throws NoOpHandleMove when direction == order.
/// The logical clock is not advanced here.
SystemState handle_event(HandleState direction, const SystemState& s, const SimConfig& cfg = {});

/// Module-failure injection: module m's outputs are forced FALSE from now on.
SystemState silence_module(const SystemState& s, ModuleId m);

}  // namespace lgs::controller
