#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "proofloop/core/trace_event.hpp"
#include "proofloop/core/types.hpp"
#include "proofloop/dialectic/context.hpp"
#include "proofloop/gateway/gateway.hpp"
#include "proofloop/prompts/registry.hpp"

namespace proofloop::dialectic {

// Where a call chain runs: run id, lane for its calls, phase for its events,
// an optional token pool and the buffer its events go to.
struct CallSite {
  std::string run_id;
  std::string lane;
  int phase = 1;
  std::shared_ptr<gateway::TokenPool> pool;
  EventBuffer* events = nullptr;

  CallSite sub(const std::string& suffix) const;
};

// One completed model call.
struct CallResult {
  std::string prompt;
  std::string text;
  gateway::Usage usage;
  Usd usd;
};

struct SolveOptions {
  Origin origin = Origin::fresh;
  // Ids for the returned solutions, called in branch order after joining.
  // Defaults to "<lane>/b<i>".
  std::function<std::string()> next_id;
};

// One branch of a fan-out: its own context and the origin its result gets.
struct BranchSpec {
  SolveContext context;
  Origin origin = Origin::fresh;
};

struct SolveResult {
  std::vector<CandidateSolution> solutions;  // completed branches, by index
  bool budget_exhausted = false;
  std::vector<std::string> dropped;  // "b3: <reason>" for branches that failed
};

struct VerifyOutcome {
  bool success = false;
  std::vector<GradeReport> grades;  // one per grading call made
};

// Drafts, censors, grades, refines and re-grades candidate proofs.
class DialecticEngine {
 public:
  DialecticEngine(gateway::Gateway& gateway, const prompts::PromptRegistry& prompts,
                  const PipelineConfig& config);

  // `count` concurrent branches; events of branch i are appended in index
  // order to site.events regardless of completion order.
  SolveResult solve(const Problem& problem, const SolveContext& ctx, int count, const CallSite& site,
                    const SolveOptions& options = {});
  // Same, with one branch per BranchSpec; options.origin is ignored.
  SolveResult solve_each(const Problem& problem, const std::vector<BranchSpec>& branches, const CallSite& site,
                         const SolveOptions& options = {});

  // One processor call; empty iff the response is exactly NO_ISSUES.
  std::vector<std::string> lazy_phrase_check(const std::string& proof_text, const CallSite& site,
                                             Usd* cost = nullptr);

  // One grader call. `materials` fills the grader's additional_materials slot.
  GradeReport grade(const Problem& problem, const std::string& proof_text, const std::string& materials,
                    const CallSite& site, Usd* cost = nullptr, const std::string& kind = "grade");

  // n fresh grading calls, stopping at the first that is not a clean 7.
  VerifyOutcome verified_success(const Problem& problem, const CandidateSolution& solution, int n,
                                 const CallSite& site);

  // One solver-role call on the configured solver template (no event).
  CallResult solver_call(const Problem& problem, const std::string& materials, const CallSite& site);

  // Renders a template and sends it through the gateway (no event).
  CallResult call(Role role, prompts::TemplateId tmpl, const prompts::Slots& slots, const CallSite& site);

  // Appends an event; adds prompt and response when trace_prompts is set.
  void record(const CallSite& site, const std::string& kind, nlohmann::json data,
              const CallResult* call = nullptr) const;

  const PipelineConfig& config() const { return config_; }
  const prompts::PromptRegistry& prompts() const { return prompts_; }
  gateway::Gateway& gateway() { return gateway_; }

 private:
  CandidateSolution run_branch(const Problem& problem, const SolveContext& ctx, const CallSite& site,
                               Origin origin);

  gateway::Gateway& gateway_;
  const prompts::PromptRegistry& prompts_;
  PipelineConfig config_;
};

std::string format_grade_feedback(const GradeReport& grade);

}  // namespace proofloop::dialectic
