#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proofloop/core/types.hpp"

namespace proofloop::dialectic {

struct PriorSolution {
  std::string id;
  std::string proof_text;
  std::optional<int> score;
};

// A labelled free-form block (grading reports, partial progress, ...).
struct ContextNote {
  std::string label;
  std::string text;
};

// Everything injected into the "Additional Materials" slot. Serialization is
// deterministic: user hints, lemmas, unresolved conjectures, feedback,
// scaffolding, prior solutions, then notes, each in insertion order.
struct SolveContext {
  std::optional<std::string> hints;  // the problem's own additional materials
  std::vector<Lemma> lemmas;
  std::vector<FailedPair> failures;
  std::vector<std::string> feedback;
  std::vector<std::string> scaffolding;
  std::vector<PriorSolution> prior_solutions;
  std::vector<ContextNote> notes;

  static SolveContext for_problem(const Problem& p);

  bool empty() const;
  // Empty string when there is nothing to say.
  std::string serialize() const;
  std::string digest() const;

  void add_prior(const CandidateSolution& s);
};

}  // namespace proofloop::dialectic
