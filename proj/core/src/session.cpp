#include "lgs/session.hpp"

#include <json.hpp>

#include "lgs/errors.hpp"

namespace lgs {

namespace {

using Json = nlohmann::ordered_json;

std::string error(std::string_view code, std::string_view detail) {
  Json j;
  j["type"] = "error";
  j["code"] = code;
  j["detail"] = detail;
  return j.dump();
}

struct BadArgs : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

Session::Session(std::string preset, SimConfig cfg)
    : preset_(std::move(preset)), cfg_(cfg), state_(kernel::preset_state(preset_, cfg_)) {}

void Session::reset(const std::string& preset) {
  state_ = kernel::preset_state(preset, cfg_);
  preset_ = preset;
  pending_.clear();
  last_event_.clear();
}

// Pilot commands wait for the next pilot window, like scripted actions.
bool Session::apply_pending() {
  if (pending_.empty() || !kernel::pilot_window(state_, cfg_)) return false;
  const Pending p = pending_.front();
  pending_.pop_front();
  const HandleState dir = p == Pending::HandleUp ? HandleState::hUp : HandleState::hDown;
  if (state_.internals.order == dir) return true;  // nothing to do, still consumed
  const auto e = kernel::Event::handle(dir);
  state_ = kernel::fire(state_, e, cfg_);
  last_event_ = kernel::to_string(e);
  return true;
}

bool Session::micro_step() {
  if (apply_pending()) return true;
  auto f = kernel::step(state_, policy_, cfg_);
  if (!f) return false;
  state_ = std::move(f->state);
  last_event_ = kernel::to_string(f->event);
  return true;
}

void Session::run_batch() {
  const auto cycle = state_.cursor.macro_cycle;
  for (std::uint64_t i = 0; i < kBatchLimit; ++i) {
    if (!micro_step()) return;
    if (state_.cursor.macro_cycle != cycle && pending_.empty()) return;
  }
}

std::string Session::state_message() const {
  Json j;
  j["type"] = "state";
  j["snapshot"] = Json::parse(to_json(flatten(state_)));
  Json vs = Json::array();
  for (const auto& v : monitor::check_safety(state_))
    vs.push_back({{"id", std::string(monitor::to_string(v.id))}, {"holds", v.holds}});
  j["verdicts"] = std::move(vs);
  Json en = Json::array();
  for (int e : kernel::enabled_events(state_, state_.cursor.phase, cfg_))
    en.push_back(kernel::catalog()[static_cast<std::size_t>(e)].name);
  j["enabled_events"] = std::move(en);
  j["llc"] = state_.llc;
  j["paused"] = paused_;
  j["pending"] = pending_.size();
  j["last_event"] = last_event_;
  return j.dump();
}

std::vector<std::string> Session::handle(std::string_view line) {
  Json msg;
  try {
    msg = Json::parse(line);
  } catch (const std::exception& e) {
    return {error("bad_json", e.what())};
  }
  if (!msg.is_object() || msg.value("type", std::string{}) != "command" || !msg.contains("cmd") ||
      !msg["cmd"].is_string())
    return {error("bad_command", "expected {type:\"command\", cmd, args}")};

  const std::string cmd = msg["cmd"].get<std::string>();
  const Json args = msg.contains("args") ? msg["args"] : Json::object();
  try {
    if (cmd == "handle_up" || cmd == "handle_down") {
      pending_.push_back(cmd == "handle_up" ? Pending::HandleUp : Pending::HandleDown);
    } else if (cmd == "inject_fault") {
      if (!args.is_object() || !args.contains("spec") || !args["spec"].is_string())
        throw BadArgs("inject_fault needs args.spec");
      FaultSpec f;
      try {
        f = parse_fault(args["spec"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw BadArgs(e.what());
      }
      state_ = kernel::fire(state_, kernel::Event{kernel::Event::Kind::InjectFault, 0, f, {}}, cfg_);
      last_event_ = "inject_fault(" + to_string(f) + ")";
    } else if (cmd == "clear_faults") {
      state_ = kernel::fire(state_, kernel::Event{kernel::Event::Kind::ClearFaults, 0, {}, {}}, cfg_);
      last_event_ = "clear_faults";
    } else if (cmd == "pause") {
      paused_ = true;
      return {state_message()};
    } else if (cmd == "resume") {
      paused_ = false;
    } else if (cmd == "step_once") {
      micro_step();
      return {state_message()};
    } else if (cmd == "reset") {
      std::string preset = preset_;
      if (args.is_object() && args.contains("preset")) {
        if (!args["preset"].is_string()) throw BadArgs("preset must be a string");
        preset = args["preset"].get<std::string>();
      }
      try {
        reset(preset);
      } catch (const Error& e) {
        throw BadArgs(e.what());
      }
      return {state_message()};
    } else if (cmd == "set_policy") {
      const std::string p = args.is_object() ? args.value("policy", std::string{}) : "";
      if (p == "interactive") {
        policy_ = kernel::ChoicePolicy::interactive();
      } else if (p == "random") {
        if (args.contains("seed") && !args["seed"].is_number_unsigned())
          throw BadArgs("seed must be a non-negative integer");
        policy_ = kernel::ChoicePolicy::seeded(args.value("seed", std::uint64_t{0}));
      } else {
        throw BadArgs("policy must be interactive or random");
      }
      return {state_message()};
    } else {
      return {error("bad_command", "unknown command '" + cmd + "'")};
    }
  } catch (const BadArgs& e) {
    return {error("bad_args", e.what())};
  } catch (const std::exception& e) {
    return {error("internal", e.what())};
  }
  if (!paused_) run_batch();
  return {state_message()};
}

}  // namespace lgs
