#pragma once

// Line-delimited trace files: one header line, one line per fired event, one
// footer line. Each line is a JSON object with a "type" field.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgs/monitor.hpp"
#include "lgs/state.hpp"

namespace lgs {

inline constexpr int kTraceSchema = 1;

struct TraceHeader {
  int schema = kTraceSchema;
  std::string scenario;
  std::string preset = "stable_ground";
  std::uint64_t seed = 0;
  SimConfig config;
  std::uint64_t catalog_version = 0;
};

struct TraceRecord {
  std::uint64_t step = 0;
  std::string event;
  std::uint64_t llc = 0;
  std::uint64_t fingerprint = 0;
  FlatRecord delta;  // may be empty when deltas are not recorded
};

struct TraceFooter {
  std::uint64_t final_fingerprint = 0;
  std::string stop_reason;
  std::uint64_t cycles_completed = 0;
  std::vector<monitor::Verdict> verdicts;
  std::string summary;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRecord> records;
  std::optional<TraceFooter> footer;
};

std::string write_trace(const Trace& t);
Trace read_trace(std::string_view text);  // throws TraceFormatError

std::string verdict_json(const monitor::Verdict& v);

}  // namespace lgs
