// lgsim: simulate scenarios, explore the state space, check traces, serve
// interactive sessions.
//
// Exit codes: 0 ok, 1 violation (or divergence / incomplete exploration),
// 2 input could not be parsed, 3 internal error.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "lgs/errors.hpp"
#include "lgs/explorer.hpp"
#include "lgs/kernel.hpp"
#include "lgs/scenario.hpp"
#include "serve.hpp"

namespace {

constexpr int kOk = 0, kViolation = 1, kParse = 2, kInternal = 3;

std::atomic<bool> g_stop{false};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void watermark(const lgs::SimConfig& cfg) {
  if (cfg.mutant)
    std::cout << "WATERMARK: mutant " << lgs::mutant_flag(*cfg.mutant)
              << " active; results are not nominal evidence\n";
}

std::optional<lgs::MutantId> mutant_or_die(const std::string& id) {
  if (id.empty()) return std::nullopt;
  auto m = lgs::parse_mutant(id);
  if (!m) throw CLI::ValidationError("--mutant", "unknown mutant '" + id + "'");
  return m;
}

// ---- simulate ----

struct SimulateArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed, steps;
  std::string trace_out;
  std::string mutant;
  bool no_deltas = false;
};

int cmd_simulate(const SimulateArgs& a) {
  lgs::Scenario sc;
  try {
    sc = lgs::parse_scenario(slurp(a.scenario));
  } catch (const lgs::ScenarioParseError& e) {
    std::cerr << a.scenario << ": " << e.what() << "\n";
    return kParse;
  }
  if (a.seed) sc.seed = *a.seed;
  if (a.steps) sc.max_steps = *a.steps;
  if (auto m = mutant_or_die(a.mutant)) sc.config.mutant = m;
  watermark(sc.config);

  lgs::kernel::RunOptions opts;
  opts.record_deltas = !a.no_deltas;
  const auto res = lgs::kernel::run(sc, opts);
  const auto& f = *res.trace.footer;
  if (!a.trace_out.empty()) spit(a.trace_out, lgs::write_trace(res.trace));

  std::cout << "scenario " << sc.name << ": " << res.trace.records.size() << " steps, stop "
            << f.stop_reason << ", final " << lgs::fingerprint_hex(f.final_fingerprint) << "\n";
  std::cout << f.summary << "\n";
  for (const auto& v : res.violations)
    std::cout << "  " << lgs::monitor::to_string(v.id) << " violated at step "
              << v.position.value_or(0) << " (" << v.witness << ")\n";
  return res.ok() ? kOk : kViolation;
}

// ---- explore ----

struct ExploreArgs {
  std::uint32_t depth = 1000;
  std::uint32_t pilot_budget = 2;
  std::string faults = "none";
  std::optional<std::uint32_t> f_max;
  std::optional<int> silent_module;
  std::string preset = "stable_ground";
  std::string mutant;
  std::string report_out;
  std::string cex_dir;
  std::uint64_t max_states = 5'000'000;
  unsigned workers = 1;
  bool no_dedupe = false;
  bool interleaved = false;
  int vote_threshold = 1;
};

std::vector<lgs::FaultSpec> fault_list(const std::string& text) {
  if (text == "none" || text.empty()) return {};
  if (text == "all-single") return lgs::explorer::all_single_channel_faults(lgs::FaultMode::StuckWrong);
  std::vector<lgs::FaultSpec> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(lgs::parse_fault(item));
  return out;
}

int cmd_explore(const ExploreArgs& a) {
  lgs::explorer::ExploreConfig cfg;
  cfg.max_depth = a.depth;
  cfg.pilot_moves_budget = a.pilot_budget;
  try {
    cfg.fault_envelope = fault_list(a.faults);
  } catch (const std::invalid_argument& e) {
    std::cerr << "--faults: " << e.what() << "\n";
    return kParse;
  }
  cfg.f_max = a.f_max.value_or(cfg.fault_envelope.empty() ? 0u : 1u);
  if (a.silent_module) cfg.silent_module = lgs::ModuleId(*a.silent_module);
  cfg.start_preset = a.preset;
  cfg.sim.mutant = mutant_or_die(a.mutant);
  cfg.sim.interleaved = a.interleaved;
  cfg.sim.vote_threshold = a.vote_threshold;
  cfg.dedupe = !a.no_dedupe;
  cfg.max_states = a.max_states;
  cfg.workers = a.workers;
  watermark(cfg.sim);

  auto rep = lgs::explorer::explore(cfg);
  for (auto& c : rep.violations) c = lgs::explorer::minimize(c);
  const std::string doc = lgs::explorer::report_json(rep, cfg);
  if (!a.report_out.empty()) spit(a.report_out, doc + "\n");
  if (!a.cex_dir.empty()) {
    std::filesystem::create_directories(a.cex_dir);
    for (const auto& c : rep.violations)
      spit(a.cex_dir + "/" + std::string(lgs::monitor::to_string(c.id)) + ".trace",
           lgs::write_trace(lgs::explorer::to_trace(c)));
  }

  std::cout << "states " << rep.states_visited << ", edges " << rep.edges_fired << ", depth "
            << rep.max_depth_reached << ", quiescent " << rep.quiescent_states << "\n";
  std::cout << (rep.frontier_exhausted ? (rep.depth_cut ? "frontier exhausted (depth-bounded)"
                                                        : "frontier exhausted")
                                       : "FrontierBudgetExceeded")
            << "\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& c : rep.violations)
    std::cout << lgs::monitor::to_string(c.id) << " counterexample, " << c.events.size()
              << " events\n";
  if (!a.report_out.empty()) std::cout << "report: " << a.report_out << "\n";
  return rep.violations.empty() && rep.frontier_exhausted ? kOk : kViolation;
}

// ---- check ----

int cmd_check(const std::string& path) {
  lgs::Trace t;
  try {
    t = lgs::read_trace(slurp(path));
  } catch (const lgs::TraceFormatError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kParse;
  }
  watermark(t.header.config);
  lgs::kernel::ReplayResult rr;
  try {
    rr = lgs::kernel::replay(t);
  } catch (const lgs::CatalogMismatch& e) {
    std::cerr << path << ": CatalogMismatch: " << e.what() << "\n";
    return kParse;
  }
  if (!rr.ok) {
    std::cout << "FingerprintDivergence at step " << rr.divergence_step.value_or(0) << ": "
              << rr.detail << "\n";
    return kViolation;
  }
  // Re-monitor every replayed state.
  const auto& cfg = t.header.config;
  auto s = lgs::kernel::preset_state(t.header.preset, cfg);
  std::uint16_t seen = 0;
  int bad = 0;
  for (const auto& r : t.records) {
    const auto e = lgs::kernel::parse_event(r.event);
    s = lgs::kernel::fire(s, e, cfg);
    const auto mask = lgs::monitor::failing_mask(s) & ~seen;
    for (auto req : lgs::monitor::kStateRequirements)
      if (mask & (1u << lgs::idx(req))) {
        std::cout << lgs::monitor::to_string(req) << " violated at step " << r.step << "\n";
        ++bad;
      }
    seen |= static_cast<std::uint16_t>(mask);
    if (r.event == "stamp_dcge" || r.event == "stamp_doge") {
      const auto which = r.event == "stamp_dcge" ? lgs::monitor::Requirement::R11bis
                                                 : lgs::monitor::Requirement::R12bis;
      const auto v = lgs::monitor::check_R1(lgs::monitor::ObservationLog::of(s), which);
      if (!v.holds) {
        std::cout << lgs::monitor::to_string(which) << " violated at step " << r.step << " ("
                  << v.witness << ")\n";
        ++bad;
      }
    }
  }
  std::cout << "replay OK, " << t.records.size() << " steps, final "
            << lgs::fingerprint_hex(lgs::state_fingerprint(s)) << "\n";
  if (bad == 0) std::cout << "no violations\n";
  return bad == 0 ? kOk : kViolation;
}

// ---- serve ----

int cmd_serve(std::uint16_t port, const std::string& preset, const std::string& mutant, bool any) {
  lgsim::ServeOptions o;
  o.port = port;
  o.preset = preset;
  o.config.mutant = mutant_or_die(mutant);
  o.loopback_only = !any;
  try {
    (void)lgs::kernel::preset_state(preset, o.config);
  } catch (const lgs::Error& e) {
    std::cerr << e.what() << "\n";
    return kParse;
  }
  watermark(o.config);
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  std::atomic<std::uint16_t> bound{0};
  std::thread announce([&] {
    while (!bound && !g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    if (bound) std::cout << "listening on " << (any ? "0.0.0.0" : "127.0.0.1") << ":" << bound << std::endl;
  });
  const int rc = lgsim::serve(o, g_stop, &bound);
  g_stop = true;
  announce.join();
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landing-gear system simulator, explorer and trace checker"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a scenario and write its trace");
  s->add_option("--scenario", sim.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  s->add_option("--seed", sim.seed, "Override the scenario seed");
  s->add_option("--steps", sim.steps, "Override max_steps")->check(CLI::PositiveNumber);
  s->add_option("--trace", sim.trace_out, "Write the trace here");
  s->add_option("--mutant", sim.mutant, "Run with a registered mutant (watermarked)");
  s->add_flag("--no-deltas", sim.no_deltas, "Omit per-step state deltas from the trace");

  ExploreArgs ex;
  auto* e = app.add_subcommand("explore", "Breadth-first exploration of reachable states");
  e->add_option("--depth", ex.depth, "Maximum BFS depth");
  e->add_option("--pilot-budget", ex.pilot_budget, "Maximum number of handle moves");
  e->add_option("--faults", ex.faults, "Fault envelope: comma-separated specs, all-single, or none");
  e->add_option("--f-max", ex.f_max, "Largest fault subset per branch");
  e->add_option("--silent-module", ex.silent_module, "Force module 1 or 2 silent")->check(CLI::Range(1, 2));
  e->add_option("--preset", ex.preset, "Start preset (stable_ground, post_hup)");
  e->add_option("--mutant", ex.mutant, "Explore a registered mutant (watermarked)");
  e->add_option("--report", ex.report_out, "Write the JSON report here");
  e->add_option("--counterexamples", ex.cex_dir, "Write minimized counterexample traces here");
  e->add_option("--max-states", ex.max_states, "State budget");
  e->add_option("--workers", ex.workers, "Parallel expansion workers")->check(CLI::PositiveNumber);
  e->add_flag("--no-dedupe", ex.no_dedupe, "Expand every path (small configs only)");
  e->add_flag("--interleaved", ex.interleaved, "Per-device door/gear events");
  e->add_option("--vote-threshold", ex.vote_threshold, "Disagreements before a channel is dropped")
      ->check(CLI::PositiveNumber);

  std::string trace_in;
  auto* c = app.add_subcommand("check", "Replay a trace and re-run the monitors");
  c->add_option("--trace", trace_in, "Trace file")->required()->check(CLI::ExistingFile);

  std::uint16_t port = 7878;
  std::string preset = "stable_ground", serve_mutant;
  bool any_addr = false;
  auto* v = app.add_subcommand("serve", "Line-delimited JSON session server for the cockpit UI");
  v->add_option("--port", port, "TCP port (0 = pick one)");
  v->add_option("--preset", preset, "Initial preset for new sessions");
  v->add_option("--mutant", serve_mutant, "Serve a mutant (watermarked)");
  v->add_flag("--any-address", any_addr, "Listen on all interfaces instead of loopback");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*e) return cmd_explore(ex);
    if (*c) return cmd_check(trace_in);
    if (*v) return cmd_serve(port, preset, serve_mutant, any_addr);
  } catch (const CLI::ValidationError& err) {
    std::cerr << err.what() << "\n";
    return kParse;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
