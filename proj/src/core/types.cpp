#include "proofloop/core/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "proofloop/core/errors.hpp"

namespace proofloop {
namespace {

template <typename E, std::size_t N>
E lookup(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
         std::string_view what) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  throw InvalidArgument("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E e, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [v, name] : table) {
    if (v == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Role, std::string_view>, 6> kRoles{{
    {Role::solver, "solver"},
    {Role::grader, "grader"},
    {Role::extractor, "extractor"},
    {Role::parser, "parser"},
    {Role::processor, "processor"},
    {Role::judge, "judge"},
}};

constexpr std::array<std::pair<Origin, std::string_view>, 4> kOrigins{{
    {Origin::fresh, "fresh"},
    {Origin::contextual, "contextual"},
    {Origin::guided, "guided"},
    {Origin::post_enhanced, "post_enhanced"},
}};

constexpr std::array<std::pair<Severity, std::string_view>, 2> kSeverities{{
    {Severity::slip, "slip"},
    {Severity::fallacy, "fallacy"},
}};

constexpr std::array<std::pair<Polarity, std::string_view>, 2> kPolarities{{
    {Polarity::positive, "positive"},
    {Polarity::negative, "negative"},
}};

constexpr std::array<std::pair<FailureReason, std::string_view>, 2> kReasons{{
    {FailureReason::ambiguous, "Ambiguous"},
    {FailureReason::unresolved, "Unresolved"},
}};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string_view to_string(Role r) { return name_of(r, kRoles); }
Role role_from_string(std::string_view s) { return lookup(s, kRoles, "role"); }
std::string_view to_string(Origin o) { return name_of(o, kOrigins); }
Origin origin_from_string(std::string_view s) { return lookup(s, kOrigins, "origin"); }
std::string_view to_string(Severity s) { return name_of(s, kSeverities); }
Severity severity_from_string(std::string_view s) { return lookup(s, kSeverities, "severity"); }
std::string_view to_string(Polarity p) { return name_of(p, kPolarities); }
Polarity polarity_from_string(std::string_view s) { return lookup(s, kPolarities, "polarity"); }
std::string_view to_string(FailureReason r) { return name_of(r, kReasons); }
FailureReason failure_reason_from_string(std::string_view s) {
  return lookup(s, kReasons, "failure reason");
}

void Problem::validate() const {
  if (blank(statement)) throw InvalidArgument("problem statement is empty");
  if (id.empty()) throw InvalidArgument("problem id is empty");
}

GradeReport GradeReport::make(int score, std::vector<Issue> issues,
                              std::vector<std::string> scaffolding, std::string transcript,
                              std::vector<std::string> notes) {
  if (score < 0 || score > 7) {
    throw InvalidArgument("grade out of range: " + std::to_string(score));
  }
  if (score == 5) throw InvalidArgument("grade 5 is not allowed");
  if (score == 7 && !issues.empty()) {
    throw InvalidArgument("a perfect grade cannot list issues");
  }
  bool fallacy = std::any_of(issues.begin(), issues.end(),
                             [](const Issue& i) { return i.severity == Severity::fallacy; });
  if (fallacy && score > 3) {
    throw InvalidArgument("a fallacy caps the grade at 3, got " + std::to_string(score));
  }
  GradeReport r;
  r.score_ = score;
  r.issues_ = std::move(issues);
  r.scaffolding_ = std::move(scaffolding);
  r.transcript_ = std::move(transcript);
  r.notes_ = std::move(notes);
  return r;
}

std::size_t GradeReport::slip_count() const {
  return static_cast<std::size_t>(std::count_if(
      issues_.begin(), issues_.end(), [](const Issue& i) { return i.severity == Severity::slip; }));
}

std::size_t GradeReport::fallacy_count() const { return issues_.size() - slip_count(); }

void CandidateSolution::validate() const {
  if (blank(proof_text)) throw InvalidArgument("candidate " + id + " has empty proof text");
  if (phase < 1 || phase > 4) {
    throw InvalidArgument("candidate " + id + " has phase " + std::to_string(phase));
  }
}

void HypothesisPair::validate() const {
  if (blank(conjecture) || blank(negation)) {
    throw InvalidArgument("hypothesis pair " + id + " has an empty side");
  }
}

void Lemma::validate() const {
  bool pos = g_pos >= threshold;
  bool neg = g_neg >= threshold;
  if (pos == neg) {
    throw InvalidArgument("lemma " + pair_id + " is not decided by exactly one side");
  }
  if ((polarity == Polarity::positive) != pos) {
    throw InvalidArgument("lemma " + pair_id + " polarity disagrees with its grades");
  }
  if (blank(statement)) throw InvalidArgument("lemma " + pair_id + " has empty statement");
}

PipelineConfig PipelineConfig::pb_adv_defaults() {
  PipelineConfig c;
  c.temperatures = {{Role::solver, 0.6},    {Role::extractor, 0.6}, {Role::grader, 0.1},
                    {Role::parser, 0.1},    {Role::processor, 0.1}, {Role::judge, 0.1}};
  for (Role r : kAllRoles) c.max_output_tokens[r] = 32'000;
  return c;
}

PipelineConfig PipelineConfig::uniform_temperature_profile() {
  PipelineConfig c = pb_adv_defaults();
  for (auto& [role, t] : c.temperatures) t = 1.0;
  return c;
}

double PipelineConfig::temperature(Role r) const {
  auto it = temperatures.find(r);
  if (it != temperatures.end()) return it->second;
  return (r == Role::solver || r == Role::extractor) ? 0.6 : 0.1;
}

std::int64_t PipelineConfig::max_output(Role r) const {
  auto it = max_output_tokens.find(r);
  return it != max_output_tokens.end() ? it->second : 32'000;
}

GraderVariant PipelineConfig::grader_for_phase(int phase) const {
  auto it = grader_by_phase.find(phase);
  return it != grader_by_phase.end() ? it->second : GraderVariant::simplified;
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument("invalid pipeline config: " + msg);
  };
  require(solver_width >= 1, "solver width K must be >= 1");
  require(initial_iterations >= 1, "initial iterations L0 must be >= 1");
  require(conjecture_iterations >= 0, "conjecture iterations L must be >= 0");
  require(threshold <= 7, "threshold must be <= 7");
  require(enhancement_threshold >= 0 && enhancement_threshold < threshold,
          "enhancement threshold must satisfy 0 <= tau_e < tau");
  require(verify_repeats >= 1, "verify repeats N must be >= 1");
  require(extraction_budget >= 1, "extraction budget k must be >= 1");
  require(parallel_runs >= 1, "parallel runs must be >= 1");
  require(seed_count >= 1, "seed count must be >= 1");
  require(memory_prompt_cap >= 1, "memory prompt cap must be >= 1");
  require(post_enhance_sessions >= 1, "post-enhancement sessions must be >= 1");
  require(token_budget > 0, "token budget must be > 0");
  require(pair_token_budget >= 0, "pair token budget must be >= 0");
  require(max_workers >= 1, "max workers must be >= 1");
  for (const auto& [role, t] : temperatures) {
    require(t >= 0.0 && std::isfinite(t), "temperature for " + std::string(to_string(role)));
  }
  for (const auto& [role, n] : max_output_tokens) {
    require(n > 0, "max output tokens for " + std::string(to_string(role)));
  }
}

void GradingRecord::validate() const {
  if (human < 0 || human > 7) {
    throw InvalidArgument("human grade out of range: " + std::to_string(human));
  }
  if (!(predicted >= 0.0 && predicted <= 7.0)) {
    throw InvalidArgument("predicted grade out of range: " + std::to_string(predicted));
  }
}

bool better_candidate(const CandidateSolution& a, const CandidateSolution& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  std::size_t ai = a.grade ? a.grade->issues().size() : 0;
  std::size_t bi = b.grade ? b.grade->issues().size() : 0;
  if (ai != bi) return ai < bi;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.id < b.id;
}

const CandidateSolution& best(std::span<const CandidateSolution> solutions) {
  if (solutions.empty()) throw NoCandidates();
  for (const auto& s : solutions) {
    if (!s.grade) throw InvalidArgument("candidate " + s.id + " is ungraded");
  }
  return *std::min_element(solutions.begin(), solutions.end(), better_candidate);
}

std::vector<CandidateSolution> ranked(std::span<const CandidateSolution> solutions) {
  std::vector<CandidateSolution> out(solutions.begin(), solutions.end());
  std::stable_sort(out.begin(), out.end(), better_candidate);
  return out;
}

}  // namespace proofloop
