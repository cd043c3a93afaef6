#pragma once

// Guarded-event scheduler. Every state carries its phase (sense, decision,
// order); a step fires exactly one enabled event of the current phase and
// then normalizes the cursor forward to the next phase that has work.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lgs/monitor.hpp"
#include "lgs/scenario.hpp"
#include "lgs/state.hpp"
#include "lgs/trace.hpp"

namespace lgs::kernel {

enum class EventKind : std::uint8_t {
  DoorSync,
  DoorDevice,
  GearSync,
  GearDevice,
  SwitchOpen,
  SenseRefresh,
  VoteHealth,
  Spawn,
  Module,
  Merge,
  StampDcge,
  StampDoge,
};

struct CatalogEntry {
  std::string name;
  EventKind kind;
  Phase phase;
  std::uint8_t a = 0;  // edge, or module index
  std::uint8_t b = 0;  // device, or module event
};

/// Closed, ordered event catalog. Order is the deterministic tie-break order.
const std::vector<CatalogEntry>& catalog();
std::uint64_t catalog_version();
std::optional<int> find_event(std::string_view name);

/// An event as recorded in traces: a catalog event or an environment action
/// (pilot handle, fault activation, module silencing).
struct Event {
  enum class Kind : std::uint8_t { Catalog, HandleUp, HandleDown, InjectFault, ClearFaults, SilenceModule };
  Kind kind = Kind::Catalog;
  int index = 0;  // catalog index
  FaultSpec fault{};
  ModuleId module{};

  static Event of(int catalog_index) { return Event{Kind::Catalog, catalog_index, {}, {}}; }
  static Event handle(HandleState dir) {
    return Event{dir == HandleState::hUp ? Kind::HandleUp : Kind::HandleDown, 0, {}, {}};
  }
  static Event from(const ScriptedAction& a);
  bool is_environment() const { return kind != Kind::Catalog; }
  bool operator==(const Event&) const = default;
};

std::string to_string(const Event& e);
Event parse_event(std::string_view text);  // throws TraceFormatError

bool event_enabled(const SystemState& s, int catalog_index, const SimConfig& cfg);

/// Catalog indices whose guards hold in `phase`, in catalog order.
std::vector<int> enabled_events(const SystemState& s, Phase phase, const SimConfig& cfg);

/// Moves the cursor to the first phase (wrapping into new macro-cycles) that
/// has an enabled event. A state with none anywhere is returned unchanged.
SystemState normalize(const SystemState& s, const SimConfig& cfg);

/// No event enabled in any phase (of a normalized state).
bool quiescent(const SystemState& s, const SimConfig& cfg);

/// Pilot actions are accepted before the first event of a macro-cycle, or at
/// a quiescent state.
bool pilot_window(const SystemState& s, const SimConfig& cfg);

/// Applies `e`, advances llc, and normalizes. Catalog events must be enabled
/// in the current phase (std::logic_error otherwise); a handle move equal to
/// the current order throws NoOpHandleMove.
SystemState fire(const SystemState& s, const Event& e, const SimConfig& cfg);

enum class PolicyKind : std::uint8_t { SeededRandom, Interactive, ScriptDriven, ExplorerBranch };

class ChoicePolicy {
 public:
  static ChoicePolicy seeded(std::uint64_t seed);
  static ChoicePolicy interactive();  // first enabled in catalog order
  static ChoicePolicy scripted(std::vector<std::string> event_names);
  static ChoicePolicy explorer_branch();

  PolicyKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  /// Picks one of `enabled` (nonempty). Scripted: the next name, which must be
  /// enabled. ExplorerBranch cannot choose (the explorer enumerates).
  int choose(const std::vector<int>& enabled);

 private:
  PolicyKind kind_ = PolicyKind::Interactive;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  std::vector<std::string> script_;
  std::size_t pos_ = 0;
};

struct Fired {
  SystemState state;
  Event event;
};

/// One micro-step; nullopt = Quiescent.
std::optional<Fired> step(const SystemState& s, ChoicePolicy& policy, const SimConfig& cfg);

SystemState preset_state(std::string_view preset, const SimConfig& cfg = {});  // throws Error

struct RunOptions {
  bool record_deltas = true;
  std::optional<bool> stop_on_violation;  // overrides the scenario
};

enum class StopReason : std::uint8_t { Quiescent, MaxSteps, Violation };
std::string_view to_string(StopReason r);

struct RunResult {
  Trace trace;
  SystemState final_state;
  StopReason stop = StopReason::Quiescent;
  std::vector<monitor::Verdict> violations;  // first violation per requirement
  std::vector<monitor::Verdict> cycle_verdicts;  // one per stamped cycle end
  std::vector<monitor::ObservationLog> cycle_logs;  // the stamps each verdict was judged on
  bool incomplete_cycle = false;
  bool ok() const { return violations.empty(); }
};

/// Iterates step(), applying scripted actions at their macro-cycles (or as
/// soon as the system is quiescent). Throws std::invalid_argument when
/// max_steps == 0.
RunResult run(const Scenario& sc, ChoicePolicy& policy, std::uint64_t max_steps,
              const RunOptions& opts = {});
RunResult run(const Scenario& sc, const RunOptions& opts = {});

struct ReplayResult {
  bool ok = true;
  std::optional<std::uint64_t> divergence_step;  // FingerprintDivergence(step)
  std::string detail;
  SystemState final_state;
};

/// Re-fires the recorded events from the header's preset. Throws
/// CatalogMismatch when the trace was produced by another catalog.
ReplayResult replay(const Trace& t);

/// Replays a bare event list without fingerprints; nullopt if some event is
/// not enabled (or a handle move is a no-op) when its turn comes.
std::optional<SystemState> replay_events(const SystemState& start, const std::vector<Event>& events,
                                         const SimConfig& cfg);

}  // namespace lgs::kernel
