#include "proofloop/orchestrator/trace.hpp"

#include <regex>
#include <sstream>

#include "proofloop/core/errors.hpp"
#include "proofloop/core/json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace proofloop::orchestrator {
namespace {

constexpr const char* kTraceSchema = "proofloop-trace";
constexpr const char* kCheckpointSchema = "proofloop-checkpoint";

json prices_json(const gateway::PriceEntry& p) {
  return json{{"input_per_million", p.input.to_string()}, {"output_per_million", p.output.to_string()}};
}

gateway::PriceEntry prices_from(const json& j) {
  return gateway::PriceEntry{Rate::parse(j.at("input_per_million").get<std::string>()),
                             Rate::parse(j.at("output_per_million").get<std::string>())};
}

}  // namespace

json TraceHeader::to_json() const {
  return json{{"type", "header"},
              {"schema", kTraceSchema},
              {"version", version},
              {"problem", problem},
              {"config", config},
              {"runs", runs},
              {"prompts_version", prompts_version},
              {"backend", {{"kind", backend_kind}, {"id", backend_id}, {"prices", prices_json(prices)}}},
              {"script", script},
              {"script_digest", script_digest}};
}

TraceHeader TraceHeader::from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kTraceSchema) throw VersionError("not a run trace header");
  TraceHeader h;
  h.version = j.value("version", 0);
  if (h.version != kTraceVersion) {
    throw VersionError("trace schema version " + std::to_string(h.version) + " is not supported (expected " +
                       std::to_string(kTraceVersion) + ")");
  }
  try {
    h.problem = j.at("problem").get<Problem>();
    h.config = j.at("config").get<PipelineConfig>();
    h.runs = j.at("runs").get<std::vector<std::string>>();
    h.prompts_version = j.at("prompts_version").get<std::string>();
    const auto& b = j.at("backend");
    h.backend_kind = b.at("kind").get<std::string>();
    h.backend_id = b.at("id").get<std::string>();
    h.prices = prices_from(b.at("prices"));
    h.script = j.value("script", json());
    h.script_digest = j.value("script_digest", "");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("trace header: ") + e.what());
  }
  return h;
}

TraceSink::TraceSink(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  out_.emplace(file, std::ios::trunc);
  if (!*out_) throw Error("cannot write trace file " + file.string());
}

void TraceSink::start(const TraceHeader& header) {
  std::lock_guard lock(mu_);
  if (out_) *out_ << header.to_json().dump() << "\n" << std::flush;
}

void TraceSink::write(const TraceEvent& event) {
  std::lock_guard lock(mu_);
  events_.push_back(event);
  if (out_) *out_ << json(event).dump() << "\n" << std::flush;
}

std::vector<TraceEvent> TraceSink::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<TraceEvent> TraceSink::events_for(const std::string& run) const {
  std::lock_guard lock(mu_);
  std::vector<TraceEvent> out;
  for (const auto& e : events_) {
    if (e.run == run) out.push_back(e);
  }
  return out;
}

TraceFile read_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trace file " + path.string());
  TraceFile out;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      out.header = TraceHeader::from_json(j);
      have_header = true;
      continue;
    }
    try {
      out.events.push_back(j.get<TraceEvent>());
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError(path.string() + ": empty trace");
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

json Checkpoint::to_json() const {
  return json{{"schema", kCheckpointSchema},
              {"version", version},
              {"id", id},
              {"index", index},
              {"prompts_version", prompts_version},
              {"backend_id", backend_id},
              {"script_digest", script_digest},
              {"state", state},
              {"ledger", ledger},
              {"backend_state", backend_state},
              {"trace_seq", trace_seq}};
}

Checkpoint Checkpoint::from_json(const json& j) {
  try {
    if (j.value("schema", "") != kCheckpointSchema) throw ResumeError("not a checkpoint");
    Checkpoint cp;
    cp.version = j.at("version").get<int>();
    if (cp.version != kCheckpointVersion) {
      throw ResumeError("checkpoint version " + std::to_string(cp.version) + " is not supported");
    }
    cp.id = j.at("id").get<std::string>();
    cp.index = j.at("index").get<int>();
    cp.prompts_version = j.at("prompts_version").get<std::string>();
    cp.backend_id = j.at("backend_id").get<std::string>();
    cp.script_digest = j.value("script_digest", "");
    cp.state = j.at("state").get<RunState>();
    cp.ledger = j.at("ledger").get<std::vector<gateway::CostEntry>>();
    cp.backend_state = j.value("backend_state", json::object());
    cp.trace_seq = j.at("trace_seq").get<std::uint64_t>();
    return cp;
  } catch (const ResumeError&) {
    throw;
  } catch (const std::exception& e) {
    throw ResumeError(std::string("corrupt checkpoint: ") + e.what());
  }
}

void save_checkpoint(const fs::path& path, const Checkpoint& cp) { write_atomic(path, cp.to_json().dump(1)); }

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ResumeError("checkpoint not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ResumeError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
  return Checkpoint::from_json(j);
}

std::string phase_sequence(const std::vector<TraceEvent>& run_events) {
  std::string out;
  for (const auto& e : run_events) {
    if (e.phase <= 0) continue;
    char c = static_cast<char>('0' + e.phase);
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

bool phase_order_ok(const std::string& sequence, bool budget_exhausted) {
  static const std::regex complete("1(23)*4?");
  static const std::regex truncated("(1(23)*2?)?");
  return std::regex_match(sequence, complete) || (budget_exhausted && std::regex_match(sequence, truncated));
}

}  // namespace proofloop::orchestrator
