#pragma once

// Bounded breadth-first exploration of the reachable states under an
// envelope: event interleavings, budgeted pilot moves, and fault subsets
// activated at the root. Monitors are checked at every state; the shallowest
// counterexample per requirement is kept.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgs/kernel.hpp"
#include "lgs/monitor.hpp"
#include "lgs/state.hpp"

namespace lgs::explorer {

struct ExploreConfig {
  std::uint32_t max_depth = 1000;
  std::uint32_t pilot_moves_budget = 2;
  std::vector<FaultSpec> fault_envelope;
  std::uint32_t f_max = 0;  // subsets of fault_envelope up to this size, each a root
  std::optional<ModuleId> silent_module;
  std::string start_preset = "stable_ground";
  SimConfig sim;  // mutant lives here
  bool dedupe = true;
  std::uint64_t max_states = 5'000'000;
  unsigned workers = 1;

  void validate() const;  // throws std::invalid_argument
};

struct Counterexample {
  monitor::Requirement id = monitor::Requirement::R21;
  std::vector<kernel::Event> events;  // from the preset, root setup included
  std::uint32_t depth = 0;            // BFS depth of the violating state
  std::string witness;                // fingerprint of the violating state
  std::string preset = "stable_ground";
  SimConfig sim;
};

struct ExploreReport {
  std::uint64_t states_visited = 0;
  std::uint64_t edges_fired = 0;
  std::uint32_t max_depth_reached = 0;
  std::uint64_t quiescent_states = 0;
  std::uint64_t incomplete_cycle_states = 0;  // quiescent with endCycle = FALSE
  std::uint64_t completed_cycles_checked = 0;
  bool frontier_exhausted = false;  // everything within max_depth was expanded
  bool depth_cut = false;           // some state at max_depth still had successors
  bool budget_exceeded = false;  // FrontierBudgetExceeded: partial coverage
  std::vector<Counterexample> violations;  // sorted by (requirement, depth, witness)
  std::vector<std::string> warnings;

  bool has(monitor::Requirement r) const;
  const Counterexample* find(monitor::Requirement r) const;
};

ExploreReport explore(const ExploreConfig& cfg);

/// First position in `events` after which `id` fails, replaying from the
/// counterexample's preset; nullopt if it never fails or the list does not
/// replay.
std::optional<std::size_t> violation_index(const Counterexample& c);

/// Strips everything after the first violation, then greedily deletes events
/// while the shortened list still replays and still violates the same
/// requirement. Throws NotReproducible if `c` does not reproduce.
Counterexample minimize(const Counterexample& c);

/// Replays the counterexample into a standard trace file.
Trace to_trace(const Counterexample& c);

std::string report_json(const ExploreReport& r, const ExploreConfig& cfg);

/// Every single-channel fault over all sensor channels (42 of them) in `mode`.
std::vector<FaultSpec> all_single_channel_faults(FaultMode mode, std::uint32_t from_step = 0);

}  // namespace lgs::explorer
