#pragma once

// Requirement predicates over single states (safety, anomaly consistency,
// binding invariants) and over the observation stamps of a control cycle.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgs/state.hpp"

namespace lgs::monitor {

enum class Requirement : std::uint8_t {
  R21, R22, R31, R32, R41, R42, R51, ANO, BIND, R11bis, R12bis
};
enum class RequirementKind : std::uint8_t { StatePredicate, CyclePredicate };

inline constexpr std::array<Requirement, 9> kStateRequirements{
    Requirement::R21, Requirement::R22, Requirement::R31, Requirement::R32, Requirement::R41,
    Requirement::R42, Requirement::R51, Requirement::ANO, Requirement::BIND};

std::string_view to_string(Requirement r);
std::optional<Requirement> parse_requirement(std::string_view s);
RequirementKind kind(Requirement r);

struct Verdict {
  Requirement id = Requirement::R21;
  bool holds = true;
  bool incomplete = false;     // cycle predicate whose preconditions are unmet (warning)
  std::string witness;         // state fingerprint, or the offending stamp
  std::optional<std::uint64_t> position;  // trace step, when known

  bool operator==(const Verdict&) const = default;
};

/// Bit i set = kStateRequirements[i]-th requirement violated (bit index is the
/// Requirement enum value).
std::uint16_t failing_mask(const SystemState& s);

/// All state predicates, in kStateRequirements order.
std::vector<Verdict> check_safety(const SystemState& s);

/// Individual predicates; the sensed-view ones read the voted (trusted) view.
bool holds(Requirement r, const SystemState& s);

/// ldate(obs) := llc. The caller advances llc afterwards.
SystemState stamp(ObsEvent obs, const SystemState& s);

struct ObservationLog {
  std::array<std::optional<std::uint64_t>, kObsEvents> ldate{};
  std::uint64_t llc = 0;
  bool endCycle = false;

  static ObservationLog of(const SystemState& s) { return {s.ldate, s.llc, s.internals.endCycle}; }
};

/// R11bis (dcge after a maintained downH) or R12bis (doge after a maintained
/// upH). Unmet preconditions give holds=true with incomplete=true.
Verdict check_R1(const ObservationLog& log, Requirement which = Requirement::R11bis);

}  // namespace lgs::monitor
