#include "lgs/trace.hpp"

#include <json.hpp>

#include "lgs/errors.hpp"

namespace lgs {

namespace {

using Json = nlohmann::ordered_json;

std::uint64_t parse_hex(const Json& j, const char* field) {
  if (!j.is_string()) throw TraceFormatError(std::string(field) + " must be a hex string");
  const auto s = j.get<std::string>();
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw TraceFormatError(std::string(field) + ": bad hex '" + s + "'");
  return v;
}

Json verdict_obj(const monitor::Verdict& v) {
  Json j;
  j["id"] = std::string(monitor::to_string(v.id));
  j["holds"] = v.holds;
  j["incomplete"] = v.incomplete;
  j["witness"] = v.witness;
  j["position"] = v.position ? Json(*v.position) : Json(nullptr);
  return j;
}

monitor::Verdict verdict_from(const Json& j) {
  monitor::Verdict v;
  auto id = monitor::parse_requirement(j.at("id").get<std::string>());
  if (!id) throw TraceFormatError("unknown requirement " + j.at("id").dump());
  v.id = *id;
  v.holds = j.at("holds").get<bool>();
  v.incomplete = j.value("incomplete", false);
  v.witness = j.value("witness", std::string{});
  if (j.contains("position") && !j["position"].is_null()) v.position = j["position"].get<std::uint64_t>();
  return v;
}

}  // namespace

std::string verdict_json(const monitor::Verdict& v) { return verdict_obj(v).dump(); }

std::string write_trace(const Trace& t) {
  std::string out;
  const auto& h = t.header;
  Json hj;
  hj["type"] = "header";
  hj["schema"] = h.schema;
  hj["scenario"] = h.scenario;
  hj["preset"] = h.preset;
  hj["seed"] = h.seed;
  hj["config"] = {{"interleaved", h.config.interleaved},
                  {"vote_threshold", h.config.vote_threshold},
                  {"mutant", h.config.mutant ? Json(std::string(mutant_flag(*h.config.mutant)))
                                             : Json(nullptr)}};
  hj["config_hash"] = fingerprint_hex(h.config.hash());
  hj["catalog_version"] = fingerprint_hex(h.catalog_version);
  if (h.config.mutant)
    hj["watermark"] = "MUTANT " + std::string(mutant_flag(*h.config.mutant)) + ": not nominal evidence";
  out += hj.dump();
  out += '\n';

  for (const auto& r : t.records) {
    Json j;
    j["type"] = "step";
    j["step"] = r.step;
    j["event"] = r.event;
    j["llc"] = r.llc;
    j["fp"] = fingerprint_hex(r.fingerprint);
    Json d = Json::object();
    for (const auto& [k, v] : r.delta) d[k] = Json::parse(v);
    j["delta"] = std::move(d);
    out += j.dump();
    out += '\n';
  }

  if (t.footer) {
    const auto& f = *t.footer;
    Json j;
    j["type"] = "footer";
    j["final_fp"] = fingerprint_hex(f.final_fingerprint);
    j["stop_reason"] = f.stop_reason;
    j["cycles_completed"] = f.cycles_completed;
    Json vs = Json::array();
    for (const auto& v : f.verdicts) vs.push_back(verdict_obj(v));
    j["verdicts"] = std::move(vs);
    j["summary"] = f.summary;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Trace read_trace(std::string_view text) {
  Trace t;
  bool have_header = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  std::optional<std::uint64_t> last_step;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      throw TraceFormatError(where + e.what());
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        if (have_header) throw TraceFormatError(where + "second header");
        auto& h = t.header;
        h.schema = j.at("schema").get<int>();
        if (h.schema != kTraceSchema)
          throw TraceFormatError(where + "unsupported schema " + std::to_string(h.schema));
        h.scenario = j.value("scenario", std::string{});
        h.preset = j.value("preset", std::string("stable_ground"));
        h.seed = j.value("seed", std::uint64_t{0});
        const auto& c = j.at("config");
        h.config.interleaved = c.value("interleaved", false);
        h.config.vote_threshold = c.value("vote_threshold", 1);
        if (c.contains("mutant") && !c["mutant"].is_null()) {
          auto m = parse_mutant(c["mutant"].get<std::string>());
          if (!m) throw TraceFormatError(where + "unknown mutant");
          h.config.mutant = *m;
        }
        h.catalog_version = parse_hex(j.at("catalog_version"), "catalog_version");
        if (j.contains("config_hash") && parse_hex(j["config_hash"], "config_hash") != h.config.hash())
          throw TraceFormatError(where + "config_hash does not match config");
        have_header = true;
      } else if (type == "step") {
        if (!have_header) throw TraceFormatError(where + "step before header");
        if (t.footer) throw TraceFormatError(where + "step after footer");
        TraceRecord r;
        r.step = j.at("step").get<std::uint64_t>();
        if (last_step && r.step <= *last_step)
          throw TraceFormatError(where + "step numbers must increase");
        last_step = r.step;
        r.event = j.at("event").get<std::string>();
        r.llc = j.at("llc").get<std::uint64_t>();
        r.fingerprint = parse_hex(j.at("fp"), "fp");
        if (j.contains("delta"))
          for (const auto& [k, v] : j["delta"].items()) r.delta.emplace_back(k, v.dump());
        t.records.push_back(std::move(r));
      } else if (type == "footer") {
        if (!have_header) throw TraceFormatError(where + "footer before header");
        TraceFooter f;
        f.final_fingerprint = parse_hex(j.at("final_fp"), "final_fp");
        f.stop_reason = j.value("stop_reason", std::string{});
        f.cycles_completed = j.value("cycles_completed", std::uint64_t{0});
        if (j.contains("verdicts"))
          for (const auto& v : j["verdicts"]) f.verdicts.push_back(verdict_from(v));
        f.summary = j.value("summary", std::string{});
        t.footer = std::move(f);
      } else {
        throw TraceFormatError(where + "unknown record type '" + type + "'");
      }
    } catch (const TraceFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw TraceFormatError(where + e.what());
    }
  }
  if (!have_header) throw TraceFormatError("trace has no header");
  return t;
}

}  // namespace lgs
