#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "proofloop/conjecture/engine.hpp"
#include "proofloop/core/run_state.hpp"
#include "proofloop/dialectic/engine.hpp"
#include "proofloop/orchestrator/trace.hpp"

namespace proofloop::orchestrator {

// Shared by every run of a session.
struct RunEnv {
  dialectic::DialecticEngine& engine;
  conjecture::ConjectureEngine& conjectures;
  TraceSink& sink;
  // Checkpoints go to <out_dir>/checkpoints; none are written when unset.
  std::optional<std::filesystem::path> out_dir;
  std::string script_digest;
};

struct PipelineResult {
  std::string run_id;
  std::optional<CandidateSolution> solution;
  Termination termination = Termination::none;
  bool verified = false;
  bool budget_exhausted = false;
  RunState state;
};

// One run of the four-phase loop over a RunState it owns.
class Pipeline {
 public:
  Pipeline(RunEnv env, RunState state);
  // Continue from a checkpoint; the trace prefix up to it is already in the sink.
  Pipeline(RunEnv env, const Checkpoint& from);

  static RunState initial_state(const std::string& run_id, const Problem& problem, const PipelineConfig& config);

  PipelineResult run();

 private:
  void phase1_step();
  void phase2_step();
  void phase3_step();
  void phase4_step();

  // Fans out one solve, stores the results, then verifies perfect newcomers.
  // True once one of them passes.
  bool solve_round(int phase, const std::string& lane, const std::vector<dialectic::BranchSpec>& specs);
  dialectic::SolveContext guided_context() const;
  dialectic::CallSite site(int phase, const std::string& lane);

  void finish(Termination t);
  void emit(int phase, const std::string& kind, const std::string& lane, nlohmann::json data);
  void commit();
  void checkpoint();
  PipelineResult result() const;

  RunEnv env_;
  RunState state_;
  EventBuffer buffer_;
  std::uint64_t seq_ = 0;
  int next_checkpoint_ = 0;
};

}  // namespace proofloop::orchestrator
