#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "lgs/errors.hpp"
#include "lgs/kernel.hpp"
#include "lgs/scenario.hpp"
#include "lgs/trace.hpp"

using namespace lgs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_parse_error(const std::string& text, std::size_t line, const std::string& field) {
  try {
    parse_scenario(text);
    ADD_FAILURE() << "accepted:\n" << text;
  } catch (const ScenarioParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

}  // namespace

TEST(Scenario, ParsesFullExample) {
  const auto sc = parse_scenario(
      "schema 1\n"
      "name demo   # trailing comment\n"
      "preset post_hup\n"
      "policy first\n"
      "seed 11\n"
      "max_steps 900\n"
      "stop_on_violation false\n"
      "interleaved true\n"
      "vote_threshold 2\n"
      "\n"
      "at 0 inject_fault door_open:2:LD:StuckWrong\n"
      "at 3 silence_module 1\n"
      "at 4 handle_down\n"
      "at 9 clear_faults\n");
  EXPECT_EQ(sc.name, "demo");
  EXPECT_EQ(sc.preset, "post_hup");
  EXPECT_EQ(sc.policy, ScenarioPolicy::First);
  EXPECT_EQ(sc.seed, 11u);
  EXPECT_EQ(sc.max_steps, 900u);
  EXPECT_FALSE(sc.stop_on_violation);
  EXPECT_TRUE(sc.config.interleaved);
  EXPECT_EQ(sc.config.vote_threshold, 2);
  ASSERT_EQ(sc.script.size(), 4u);
  EXPECT_EQ(sc.script[0].kind, ActionKind::InjectFault);
  EXPECT_EQ(to_string(sc.script[0].fault), "door_open:2:LD:StuckWrong");
  EXPECT_EQ(sc.script[1].module.value(), 1);
  EXPECT_EQ(sc.script[3].cycle, 9u);
}

TEST(Scenario, TextRoundTrip) {
  Scenario sc;
  sc.name = "rt";
  sc.seed = 77;
  sc.config.mutant = MutantId::DropDoorGuardOnExtend;
  sc.script = {ScriptedAction{0, ActionKind::HandleUp, {}, {}},
               ScriptedAction{2, ActionKind::InjectFault, parse_fault("handle:3:StuckFalse@1"), {}}};
  const auto text = to_text(sc);
  const auto back = parse_scenario(text);
  EXPECT_EQ(to_text(back), text);
  EXPECT_EQ(back.script, sc.script);
  EXPECT_EQ(back.config, sc.config);
}

TEST(Scenario, ErrorsNameLineAndField) {
  expect_parse_error("name x\n", 1, "schema");
  expect_parse_error("schema 2\n", 1, "schema");
  expect_parse_error("schema 1\nseed abc\n", 2, "seed");
  expect_parse_error("schema 1\nmax_steps 0\n", 2, "max_steps");
  expect_parse_error("schema 1\nvote_threshold 0\n", 2, "vote_threshold");
  expect_parse_error("schema 1\npolicy clever\n", 2, "policy");
  expect_parse_error("schema 1\n\n# note\nat 1 handle_sideways\n", 4, "action");
  expect_parse_error("schema 1\nat 3 handle_up\nat 1 handle_down\n", 3, "at");
  expect_parse_error("schema 1\nat 0 inject_fault bogus\n", 2, "inject_fault");
  expect_parse_error("schema 1\ncolour red\n", 2, "colour");
}

TEST(Scenario, Fixtures) {
  const auto sc = parse_scenario(slurp(std::string(LGS_TEST_DATA) + "/nominal_outgoing.scn"));
  EXPECT_EQ(sc.script.size(), 2u);
  EXPECT_THROW(parse_scenario(slurp(std::string(LGS_TEST_DATA) + "/malformed.scn")), ScenarioParseError);
}

TEST(Trace, WriteReadRoundTrip) {
  Scenario sc;
  sc.name = "trace";
  sc.seed = 4;
  sc.script = {ScriptedAction{0, ActionKind::HandleUp, {}, {}}};
  const auto r = kernel::run(sc);
  const std::string text = write_trace(r.trace);
  const Trace back = read_trace(text);
  EXPECT_EQ(write_trace(back), text);
  ASSERT_TRUE(back.footer);
  EXPECT_EQ(back.footer->stop_reason, "quiescent");
  EXPECT_EQ(back.records.size(), r.trace.records.size());
  EXPECT_EQ(back.header.config, sc.config);
}

TEST(Trace, RejectsMalformedInput) {
  Scenario sc;
  sc.script = {ScriptedAction{0, ActionKind::HandleUp, {}, {}}};
  const std::string text = write_trace(kernel::run(sc).trace);
  EXPECT_THROW(read_trace(""), TraceFormatError);
  EXPECT_THROW(read_trace("not json\n"), TraceFormatError);
  // header missing
  EXPECT_THROW(read_trace(text.substr(text.find('\n') + 1)), TraceFormatError);
  // tampered config no longer matches its hash
  std::string bad = text;
  const auto pos = bad.find("\"vote_threshold\":1");
  ASSERT_NE(pos, std::string::npos);
  bad.replace(pos, 18, "\"vote_threshold\":2");
  EXPECT_THROW(read_trace(bad), TraceFormatError);
  // steps out of order
  std::istringstream in(text);
  std::string header, first, second, rest;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_THROW(read_trace(header + "\n" + second + "\n" + first + "\n"), TraceFormatError);
}

TEST(Trace, VerdictJson) {
  monitor::Verdict v{monitor::Requirement::R31, false, false, "00000000000000ab", 12};
  const auto j = verdict_json(v);
  EXPECT_NE(j.find("\"R31\""), std::string::npos);
  EXPECT_NE(j.find("\"holds\":false"), std::string::npos);
  EXPECT_NE(j.find("12"), std::string::npos);
}
