#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proofloop/core/run_state.hpp"
#include "proofloop/core/trace_event.hpp"
#include "proofloop/gateway/ledger.hpp"
#include "proofloop/gateway/pricing.hpp"

namespace proofloop::orchestrator {

inline constexpr int kTraceVersion = 1;
inline constexpr int kCheckpointVersion = 1;

// First line of every trace file: enough to re-run the session.
struct TraceHeader {
  int version = kTraceVersion;
  Problem problem;
  PipelineConfig config;
  std::vector<std::string> runs;
  std::string prompts_version;
  std::string backend_kind;
  std::string backend_id;
  gateway::PriceEntry prices;
  nlohmann::json script;  // scripted backends only
  std::string script_digest;

  nlohmann::json to_json() const;
  // VersionError for a newer or foreign schema, SchemaError for bad fields.
  static TraceHeader from_json(const nlohmann::json& j);
};

// Thread-safe event collector; optionally streams JSONL to a file.
class TraceSink {
 public:
  TraceSink() = default;
  explicit TraceSink(const std::filesystem::path& file);

  void start(const TraceHeader& header);
  void write(const TraceEvent& event);

  std::vector<TraceEvent> events() const;
  std::vector<TraceEvent> events_for(const std::string& run) const;

 private:
  mutable std::mutex mu_;
  std::optional<std::ofstream> out_;
  std::vector<TraceEvent> events_;
};

struct TraceFile {
  TraceHeader header;
  std::vector<TraceEvent> events;
};

// ParseError names the offending line.
TraceFile read_trace(const std::filesystem::path& path);

// Write to a sibling temp file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// A snapshot of one run at a stage boundary.
struct Checkpoint {
  int version = kCheckpointVersion;
  std::string id;
  int index = 0;
  std::string prompts_version;
  std::string backend_id;
  std::string script_digest;
  RunState state;
  std::vector<gateway::CostEntry> ledger;  // this run's entries only
  nlohmann::json backend_state;           // this run's scripted cursors
  std::uint64_t trace_seq = 0;            // seq of the checkpoint event

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& j);
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
// Any unreadable or inconsistent file is a ResumeError.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Phases of the events (phase 0 skipped) with repeats collapsed, e.g. "12323".
std::string phase_sequence(const std::vector<TraceEvent>& run_events);
// Phase 1 first, then complete (2,3) rounds, then at most one Phase 4.
// A budget-exhausted run may stop after a lone Phase 2.
bool phase_order_ok(const std::string& sequence, bool budget_exhausted);

}  // namespace proofloop::orchestrator
