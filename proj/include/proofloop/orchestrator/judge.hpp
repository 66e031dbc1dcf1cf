#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/core/types.hpp"
#include "proofloop/dialectic/engine.hpp"

namespace proofloop::orchestrator {

enum class Side { A, B };

struct JudgeDecision {
  Side winner = Side::A;
  std::string justification;  // text before the deciding tag
  std::string transcript;
  bool fallback = false;  // no usable tag; chosen by better_candidate
};

// The last <decision>A|B</decision> tag in the text; nullopt if none.
std::optional<Side> parse_decision(std::string_view text);

// What the combiner sees of one run: its final and the solutions it
// produced, in creation order.
struct RunSummary {
  std::string run_id;
  CandidateSolution final_solution;
  std::vector<CandidateSolution> history;
};

std::string render_history(const RunSummary& a, const RunSummary& b);

// One combiner call (plus one retry when no tag is found). Falls back to
// better_candidate over the two finals.
JudgeDecision judge(dialectic::DialecticEngine& engine, const Problem& problem, const RunSummary& a,
                    const RunSummary& b, const dialectic::CallSite& site);

}  // namespace proofloop::orchestrator
