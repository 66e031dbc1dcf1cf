#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proofloop/gateway/gateway.hpp"
#include "proofloop/gateway/scripted_backend.hpp"
#include "proofloop/orchestrator/judge.hpp"
#include "proofloop/orchestrator/pipeline.hpp"
#include "proofloop/prompts/registry.hpp"

namespace proofloop::orchestrator {

struct SessionOptions {
  // trace.jsonl and checkpoints/ go here; nothing is written when unset.
  std::optional<std::filesystem::path> out_dir;
};

struct SessionResult {
  std::optional<CandidateSolution> solution;
  std::string winner_run;
  std::vector<PipelineResult> runs;
  std::vector<JudgeDecision> judgements;
  Termination termination = Termination::none;
  bool verified = false;
  bool budget_exhausted = false;
  std::vector<TraceEvent> events;
};

inline constexpr const char* kSessionRun = "session";

// Independent pipeline runs over one gateway (and so one ledger and one
// budget), combined by the judge.
class Session {
 public:
  Session(gateway::Gateway& gateway, const prompts::PromptRegistry& prompts);

  SessionResult run(const Problem& problem, const PipelineConfig& config, int runs,
                    const SessionOptions& options = {});

  // Restarts every run from a checkpoint named in the trace: the given one
  // for its run, the latest one for the others. Events after a checkpoint
  // are dropped. The gateway must be fresh.
  SessionResult resume(const std::filesystem::path& trace, const std::optional<std::string>& checkpoint_id,
                       const SessionOptions& options = {});

 private:
  TraceHeader header_for(const Problem& problem, const PipelineConfig& config,
                         const std::vector<std::string>& runs) const;
  std::string script_digest() const;
  SessionResult drive(const TraceHeader& header, std::vector<std::optional<Checkpoint>> starts,
                      const std::vector<TraceEvent>& prefix, const SessionOptions& options);

  gateway::Gateway& gateway_;
  const prompts::PromptRegistry& prompts_;
};

std::vector<std::string> default_run_ids(int runs);

struct Divergence {
  std::string run;
  std::size_t index = 0;  // position among the run's compared events
  std::string expected;
  std::string actual;
};

struct ReplayReport {
  bool identical = false;
  std::optional<Divergence> divergence;
  std::size_t compared = 0;
  std::string prompts_note;  // set when the registry version differs

  std::string render() const;
};

// Re-executes a scripted trace in memory and diffs it event by event
// (checkpoint markers aside). `script` replaces the embedded one.
ReplayReport replay(const std::filesystem::path& trace, const prompts::PromptRegistry& prompts,
                    const std::optional<gateway::Script>& script = std::nullopt);

// Ledger identity ignoring append order: canonical entries without seq.
std::string ledger_fingerprint(const gateway::CostLedger& ledger);

// Upper bound on completed calls per role for a session.
std::map<Role, std::int64_t> call_ceiling(const PipelineConfig& config, int runs);

}  // namespace proofloop::orchestrator
