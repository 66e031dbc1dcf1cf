#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proofloop/core/types.hpp"

namespace proofloop {

// Where a pipeline run resumes from. Stages advance in this order, with the
// phase2/phase3 pair repeating once per conjecture iteration.
enum class Stage { phase1, phase2, phase3, phase4, done };
std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);

enum class Termination { none, verified, post_enhanced, best_effort, budget_exhausted };
std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

// Full state of one pipeline run. Mutated only by the orchestrator that owns
// it; lemma memory and failure context only ever grow.
struct RunState {
  std::string run_id;
  Problem problem;
  PipelineConfig config;

  std::vector<CandidateSolution> solution_memory;  // M_sol, creation order
  std::vector<Lemma> lemma_memory;                 // M_lemma
  std::vector<FailedPair> failure_context;         // C_fail

  int phase1_iter = 0;       // completed Phase 1 iterations
  int conjecture_iter = 0;   // completed Phase 2 iterations
  Stage stage = Stage::phase1;

  // Pairs extracted in the latest Phase 2, kept for the following Phase 3.
  std::vector<FailedPair> latest_partial_progress;
  int next_solution_seq = 1;
  int next_pair_seq = 1;

  std::optional<CandidateSolution> final_solution;
  bool verified = false;
  bool budget_exhausted = false;
  Termination termination = Termination::none;

  std::string next_solution_id(int phase);
  std::string next_pair_id();
};

}  // namespace proofloop
