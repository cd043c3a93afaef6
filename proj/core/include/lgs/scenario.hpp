#pragma once

// Scenario files: a line-oriented text format.
//
//   schema 1
//   name retract_then_extend
//   preset stable_ground
//   policy random            # random | first
//   seed 7
//   max_steps 500
//   stop_on_violation true
//   vote_threshold 1
//   interleaved false
//   at 0 handle_up
//   at 30 handle_down
//   at 0 inject_fault door_open:2:LD:StuckWrong
//   at 5 silence_module 2
//   at 9 clear_faults
//
// '#' starts a comment. `at N` binds an action to macro-cycle N; actions must
// be listed with nondecreasing N.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lgs/state.hpp"

namespace lgs {

inline constexpr int kScenarioSchema = 1;

enum class ActionKind : std::uint8_t { HandleUp, HandleDown, InjectFault, ClearFaults, SilenceModule };

struct ScriptedAction {
  std::uint32_t cycle = 0;
  ActionKind kind = ActionKind::HandleUp;
  FaultSpec fault{};
  ModuleId module{};
  bool operator==(const ScriptedAction&) const = default;
};

enum class ScenarioPolicy : std::uint8_t { Random, First };

struct Scenario {
  std::string name = "unnamed";
  std::string preset = "stable_ground";
  ScenarioPolicy policy = ScenarioPolicy::Random;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 500;
  bool stop_on_violation = true;
  SimConfig config;
  std::vector<ScriptedAction> script;
};

/// Throws ScenarioParseError with the offending line and field.
Scenario parse_scenario(std::string_view text);
std::string to_text(const Scenario& s);

}  // namespace lgs
