#pragma once

#include <functional>
#include <string>
#include <vector>

#include "proofloop/core/types.hpp"
#include "proofloop/dialectic/engine.hpp"

namespace proofloop::conjecture {

struct ExtractionResult {
  std::vector<HypothesisPair> pairs;
  std::string rewritten_proof;  // the seed argument, assuming the conjectures
  std::size_t dropped_by_budget = 0;
  std::vector<std::string> warnings;  // referential-phrase lint, never fatal
};

enum class Verdict { positive, negative, ambiguous };
std::string_view to_string(Verdict v);

// Pure pair classifier: a side is proven iff it clears tau and the other
// side does not.
Verdict classify(int g_pos, int g_neg, int tau);

struct VerifyResult {
  std::vector<Lemma> proven;
  std::vector<FailedPair> failed;
  bool budget_exhausted = false;
};

struct ExtractOptions {
  int max_pairs = 3;
  // Pair ids, called once per kept pair in order. Defaults to "<lane>/h<i>".
  std::function<std::string()> next_id;
  // Extra labelled blocks for the extractor's materials.
  std::vector<dialectic::ContextNote> notes;
};

class ConjectureEngine {
 public:
  explicit ConjectureEngine(dialectic::DialecticEngine& dialectic);

  // Extractor call over the seeds, then a parser call; the parser gets one
  // retry before ExtractionFailure.
  ExtractionResult extract_hypotheses(const Problem& problem, const std::vector<CandidateSolution>& seeds,
                                      const std::vector<Lemma>& lemmas, const std::vector<FailedPair>& failures,
                                      const dialectic::CallSite& site, const ExtractOptions& options = {});

  // Each side is solved as a fresh problem with empty materials and graded
  // once. Pairs and sides run concurrently; events land in pair order.
  VerifyResult verify_hypotheses(const std::vector<HypothesisPair>& pairs, int tau,
                                 const dialectic::CallSite& site);

 private:
  struct SideOutcome {
    std::optional<int> grade;
    std::string attempt;
    std::string error;
    bool budget = false;
  };

  SideOutcome run_side(const HypothesisPair& pair, bool positive, const dialectic::CallSite& site);

  dialectic::DialecticEngine& dialectic_;
};

}  // namespace proofloop::conjecture
