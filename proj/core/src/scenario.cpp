#include "lgs/scenario.hpp"

#include <charconv>
#include <sstream>

#include "lgs/errors.hpp"

namespace lgs {

namespace {

std::vector<std::string> words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <typename T>
T number(std::size_t line, const std::string& field, const std::string& text) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ScenarioParseError(line, field, "expected a non-negative integer, got '" + text + "'");
  return v;
}

bool boolean(std::size_t line, const std::string& field, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ScenarioParseError(line, field, "expected true or false, got '" + text + "'");
}

std::string_view action_name(ActionKind k) {
  switch (k) {
    case ActionKind::HandleUp: return "handle_up";
    case ActionKind::HandleDown: return "handle_down";
    case ActionKind::InjectFault: return "inject_fault";
    case ActionKind::ClearFaults: return "clear_faults";
    case ActionKind::SilenceModule: return "silence_module";
  }
  return "?";
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  bool saw_schema = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    const auto w = words(line);
    if (w.empty()) continue;
    const std::string& key = w[0];
    auto need = [&](std::size_t n) {
      if (w.size() != n)
        throw ScenarioParseError(lineno, key,
                                 "expected " + std::to_string(n - 1) + " value(s), got " +
                                     std::to_string(w.size() - 1));
    };

    if (key == "schema") {
      need(2);
      if (number<int>(lineno, key, w[1]) != kScenarioSchema)
        throw ScenarioParseError(lineno, key, "unsupported schema " + w[1]);
      saw_schema = true;
    } else if (key == "name") {
      need(2);
      sc.name = w[1];
    } else if (key == "preset") {
      need(2);
      if (w[1] != "stable_ground" && w[1] != "post_hup")
        throw ScenarioParseError(lineno, key, "unknown preset '" + w[1] + "'");
      sc.preset = w[1];
    } else if (key == "policy") {
      need(2);
      if (w[1] == "random")
        sc.policy = ScenarioPolicy::Random;
      else if (w[1] == "first")
        sc.policy = ScenarioPolicy::First;
      else
        throw ScenarioParseError(lineno, key, "expected random or first");
    } else if (key == "seed") {
      need(2);
      sc.seed = number<std::uint64_t>(lineno, key, w[1]);
    } else if (key == "max_steps") {
      need(2);
      sc.max_steps = number<std::uint64_t>(lineno, key, w[1]);
      if (sc.max_steps == 0) throw ScenarioParseError(lineno, key, "must be > 0");
    } else if (key == "stop_on_violation") {
      need(2);
      sc.stop_on_violation = boolean(lineno, key, w[1]);
    } else if (key == "interleaved") {
      need(2);
      sc.config.interleaved = boolean(lineno, key, w[1]);
    } else if (key == "vote_threshold") {
      need(2);
      sc.config.vote_threshold = number<int>(lineno, key, w[1]);
      if (sc.config.vote_threshold < 1) throw ScenarioParseError(lineno, key, "must be >= 1");
    } else if (key == "mutant") {
      need(2);
      auto m = parse_mutant(w[1]);
      if (!m) throw ScenarioParseError(lineno, key, "unknown mutant '" + w[1] + "'");
      sc.config.mutant = *m;
    } else if (key == "at") {
      if (w.size() < 3) throw ScenarioParseError(lineno, key, "expected 'at N action [arg]'");
      ScriptedAction a;
      a.cycle = number<std::uint32_t>(lineno, "at", w[1]);
      const std::string& act = w[2];
      if (act == "handle_up" || act == "handle_down" || act == "clear_faults") {
        if (w.size() != 3) throw ScenarioParseError(lineno, act, "takes no argument");
        a.kind = act == "handle_up"     ? ActionKind::HandleUp
                 : act == "handle_down" ? ActionKind::HandleDown
                                        : ActionKind::ClearFaults;
      } else if (act == "inject_fault") {
        if (w.size() != 4) throw ScenarioParseError(lineno, act, "expected one fault spec");
        a.kind = ActionKind::InjectFault;
        try {
          a.fault = parse_fault(w[3]);
        } catch (const std::invalid_argument& e) {
          throw ScenarioParseError(lineno, act, e.what());
        }
      } else if (act == "silence_module") {
        if (w.size() != 4) throw ScenarioParseError(lineno, act, "expected a module number");
        const int m = number<int>(lineno, act, w[3]);
        if (m < 1 || m > kModules) throw ScenarioParseError(lineno, act, "module must be 1 or 2");
        a.kind = ActionKind::SilenceModule;
        a.module = ModuleId(m);
      } else {
        throw ScenarioParseError(lineno, "action", "unknown action '" + act + "'");
      }
      if (!sc.script.empty() && a.cycle < sc.script.back().cycle)
        throw ScenarioParseError(lineno, "at", "macro-cycle numbers must be nondecreasing");
      sc.script.push_back(a);
    } else {
      throw ScenarioParseError(lineno, key, "unknown field");
    }
  }
  if (!saw_schema) throw ScenarioParseError(1, "schema", "missing 'schema 1' line");
  return sc;
}

std::string to_text(const Scenario& s) {
  std::ostringstream o;
  o << "schema " << kScenarioSchema << '\n'
    << "name " << s.name << '\n'
    << "preset " << s.preset << '\n'
    << "policy " << (s.policy == ScenarioPolicy::Random ? "random" : "first") << '\n'
    << "seed " << s.seed << '\n'
    << "max_steps " << s.max_steps << '\n'
    << "stop_on_violation " << (s.stop_on_violation ? "true" : "false") << '\n'
    << "interleaved " << (s.config.interleaved ? "true" : "false") << '\n'
    << "vote_threshold " << s.config.vote_threshold << '\n';
  if (s.config.mutant) o << "mutant " << mutant_flag(*s.config.mutant) << '\n';
  for (const auto& a : s.script) {
    o << "at " << a.cycle << ' ' << action_name(a.kind);
    if (a.kind == ActionKind::InjectFault) o << ' ' << to_string(a.fault);
    if (a.kind == ActionKind::SilenceModule) o << ' ' << a.module.value();
    o << '\n';
  }
  return o.str();
}

}  // namespace lgs
