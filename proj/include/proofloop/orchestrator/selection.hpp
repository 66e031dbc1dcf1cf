#pragma once

#include <span>
#include <vector>

#include "proofloop/core/types.hpp"
#include "proofloop/dialectic/context.hpp"

namespace proofloop::orchestrator {

// Best-first by better_candidate, keeping the first of each proof text.
std::vector<CandidateSolution> distinct_ranked(std::span<const CandidateSolution> memory);

// The first n of distinct_ranked (fewer if memory is short).
std::vector<CandidateSolution> select_top(std::span<const CandidateSolution> memory, int n);

// The k-th best distinct solution as a context: the proof itself, its
// grader issues as feedback and its scaffolding questions. Empty when fewer
// than k solutions exist.
dialectic::SolveContext select_kth_top(std::span<const CandidateSolution> memory, int k);

}  // namespace proofloop::orchestrator
