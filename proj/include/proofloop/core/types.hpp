#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proofloop/core/money.hpp"

namespace proofloop {

// Model-facing roles. Every gateway call is attributed to exactly one.
enum class Role { solver, grader, extractor, parser, processor, judge };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);
inline constexpr Role kAllRoles[] = {Role::solver,    Role::grader,    Role::extractor,
                                     Role::parser,    Role::processor, Role::judge};

struct Problem {
  std::string id;
  std::string statement;
  std::optional<std::string> additional_materials;  // unverified hints

  void validate() const;
};

enum class Origin { fresh, contextual, guided, post_enhanced };
std::string_view to_string(Origin o);
Origin origin_from_string(std::string_view s);

enum class Severity { slip, fallacy };
std::string_view to_string(Severity s);
Severity severity_from_string(std::string_view s);

struct Issue {
  std::string text;
  Severity severity = Severity::fallacy;

  friend bool operator==(const Issue&, const Issue&) = default;
};

// Immutable grader verdict. Construction enforces the rubric: scores are
// in {0,1,2,3,4,6,7}, a perfect score carries no issues, and any fallacy
// caps the score at 3.
class GradeReport {
 public:
  static GradeReport make(int score, std::vector<Issue> issues,
                          std::vector<std::string> scaffolding = {}, std::string transcript = {},
                          std::vector<std::string> notes = {});

  int score() const { return score_; }
  const std::vector<Issue>& issues() const { return issues_; }
  const std::vector<std::string>& scaffolding() const { return scaffolding_; }
  const std::string& transcript() const { return transcript_; }
  // Parser coercions applied to reach a valid report (e.g. "5 coerced to 4").
  const std::vector<std::string>& notes() const { return notes_; }

  bool perfect() const { return score_ == 7 && issues_.empty(); }
  std::size_t slip_count() const;
  std::size_t fallacy_count() const;

  friend bool operator==(const GradeReport&, const GradeReport&) = default;

 private:
  GradeReport() = default;
  int score_ = 0;
  std::vector<Issue> issues_;
  std::vector<std::string> scaffolding_;
  std::string transcript_;
  std::vector<std::string> notes_;
};

struct CandidateSolution {
  std::string id;
  std::string problem_id;
  std::string proof_text;
  Origin origin = Origin::fresh;
  int phase = 1;
  std::optional<GradeReport> grade;
  std::string context_digest;
  // Spend attributable to producing this candidate (its branch's calls).
  Usd cost;

  void validate() const;
  int score() const { return grade ? grade->score() : -1; }
};

struct HypothesisPair {
  std::string id;
  std::string conjecture;
  std::string negation;
  std::vector<std::string> source_solution_ids;

  void validate() const;
  friend bool operator==(const HypothesisPair&, const HypothesisPair&) = default;
};

enum class Polarity { positive, negative };
std::string_view to_string(Polarity p);
Polarity polarity_from_string(std::string_view s);

struct Lemma {
  std::string statement;
  Polarity polarity = Polarity::positive;
  std::string proof_text;
  int g_pos = 0;
  int g_neg = 0;
  std::string pair_id;
  int threshold = 7;  // the bar it was verified against

  void validate() const;
  friend bool operator==(const Lemma&, const Lemma&) = default;
};

enum class FailureReason { ambiguous, unresolved };
std::string_view to_string(FailureReason r);
FailureReason failure_reason_from_string(std::string_view s);

// A pair that did not resolve, with whatever partial progress was made.
struct FailedPair {
  HypothesisPair pair;
  FailureReason reason = FailureReason::ambiguous;
  std::optional<int> g_pos;
  std::optional<int> g_neg;
  std::string pos_attempt;
  std::string neg_attempt;
  std::string detail;

  friend bool operator==(const FailedPair&, const FailedPair&) = default;
};

enum class GraderVariant { simplified, council };

struct PipelineConfig {
  int initial_iterations = 1;    // L0
  int conjecture_iterations = 3; // L
  int solver_width = 4;          // K
  int threshold = 7;             // tau
  int enhancement_threshold = 6; // tau_e
  int verify_repeats = 3;        // N
  int extraction_budget = 3;     // k
  int parallel_runs = 2;
  int seed_count = 2;            // SelectTop(M_sol, N)
  int memory_prompt_cap = 3;     // solutions serialized into prompts
  int post_enhance_sessions = 2;
  std::int64_t token_budget = 5'000'000;
  bool strict_budget = false;
  std::int64_t pair_token_budget = 0;  // 0 = no per-pair pool
  int max_workers = 4;
  std::map<Role, double> temperatures;
  std::map<Role, std::int64_t> max_output_tokens;
  // Grader prompt per phase (index 1..4); default simplified everywhere.
  std::map<int, GraderVariant> grader_by_phase;
  bool use_engineered_solver = false;
  bool trace_prompts = false;

  static PipelineConfig pb_adv_defaults();
  static PipelineConfig uniform_temperature_profile();

  double temperature(Role r) const;
  std::int64_t max_output(Role r) const;
  GraderVariant grader_for_phase(int phase) const;
  void validate() const;
};

struct GradingRecord {
  int human = 0;
  double predicted = 0.0;
  std::optional<std::string> problem_id;

  void validate() const;
};

// Strict weak "better than" order used by best(): higher score, fewer
// issues, lower creation cost, then lexicographically smaller id.
bool better_candidate(const CandidateSolution& a, const CandidateSolution& b);

// Throws NoCandidates on empty input and InvalidArgument on ungraded input.
const CandidateSolution& best(std::span<const CandidateSolution> solutions);

// Copies sorted best-first by better_candidate.
std::vector<CandidateSolution> ranked(std::span<const CandidateSolution> solutions);

}  // namespace proofloop
