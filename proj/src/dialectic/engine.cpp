#include "proofloop/dialectic/engine.hpp"

#include <sstream>

#include "proofloop/core/digest.hpp"
#include "proofloop/core/errors.hpp"
#include "proofloop/core/parallel.hpp"
#include "proofloop/dialectic/parsing.hpp"

using nlohmann::json;

namespace proofloop::dialectic {
namespace {

json grade_data(const GradeReport& g) {
  return json{{"score", g.score()},
              {"issues", g.issues().size()},
              {"slips", g.slip_count()},
              {"fallacies", g.fallacy_count()},
              {"notes", g.notes()}};
}

std::string problem_hints(const Problem& p) { return p.additional_materials.value_or(""); }

}  // namespace

CallSite CallSite::sub(const std::string& suffix) const {
  CallSite s = *this;
  s.lane = lane.empty() ? suffix : lane + "/" + suffix;
  return s;
}

std::string format_grade_feedback(const GradeReport& grade) {
  std::ostringstream out;
  out << "Grade: " << grade.score() << "/7\n";
  if (!grade.issues().empty()) {
    out << "Issues:\n";
    for (const auto& i : grade.issues()) out << "- [" << to_string(i.severity) << "] " << i.text << "\n";
  }
  if (!grade.scaffolding().empty()) {
    out << "Scaffolding questions:\n";
    for (const auto& q : grade.scaffolding()) out << "- " << q << "\n";
  }
  return out.str();
}

DialecticEngine::DialecticEngine(gateway::Gateway& gateway, const prompts::PromptRegistry& prompts,
                                 const PipelineConfig& config)
    : gateway_(gateway), prompts_(prompts), config_(config) {}

CallResult DialecticEngine::call(Role role, prompts::TemplateId tmpl, const prompts::Slots& slots,
                                 const CallSite& site) {
  gateway::ModelRequest req;
  req.role = role;
  req.prompt = prompts_.render(tmpl, slots);
  req.temperature = config_.temperature(role);
  req.max_output_tokens = config_.max_output(role);
  req.run_id = site.run_id;
  req.lane = site.lane;
  req.pool = site.pool;
  auto resp = gateway_.complete(req);
  return CallResult{std::move(req.prompt), std::move(resp.text), resp.usage,
                    gateway::cost_of(resp.usage, gateway_.prices())};
}

void DialecticEngine::record(const CallSite& site, const std::string& kind, json data,
                             const CallResult* call) const {
  if (!site.events) return;
  if (call) {
    data["tokens"] = call->usage.total();
    data["usd"] = call->usd.to_string();
    if (config_.trace_prompts) {
      data["prompt"] = call->prompt;
      data["response"] = call->text;
    }
  }
  site.events->add(site.phase, kind, site.lane, std::move(data));
}

CallResult DialecticEngine::solver_call(const Problem& problem, const std::string& materials,
                                        const CallSite& site) {
  auto tmpl = config_.use_engineered_solver ? prompts::TemplateId::solver_engineered : prompts::TemplateId::solver;
  return call(Role::solver, tmpl, {{"problem", problem.statement}, {"additional_materials", materials}}, site);
}

std::vector<std::string> DialecticEngine::lazy_phrase_check(const std::string& proof_text, const CallSite& site,
                                                            Usd* cost) {
  auto r = call(Role::processor, prompts::TemplateId::answer_processor, {{"solution", proof_text}}, site);
  if (cost) *cost += r.usd;
  auto issues = parse_censor(r.text);
  record(site, "censor", json{{"clean", issues.empty()}, {"issues", issues}}, &r);
  return issues;
}

GradeReport DialecticEngine::grade(const Problem& problem, const std::string& proof_text,
                                   const std::string& materials, const CallSite& site, Usd* cost,
                                   const std::string& kind) {
  auto tmpl = config_.grader_for_phase(site.phase) == GraderVariant::council
                  ? prompts::TemplateId::grader_council
                  : prompts::TemplateId::grader_simplified;
  auto r = call(Role::grader, tmpl,
                {{"problem", problem.statement}, {"solution", proof_text}, {"additional_materials", materials}},
                site);
  if (cost) *cost += r.usd;
  try {
    auto g = parse_grade(r.text);
    auto data = grade_data(g);
    data["solution_digest"] = short_digest(proof_text);
    record(site, kind, std::move(data), &r);
    return g;
  } catch (const GradeParseFailure& e) {
    record(site, kind, json{{"parse_failure", e.what()}}, &r);
    throw;
  }
}

VerifyOutcome DialecticEngine::verified_success(const Problem& problem, const CandidateSolution& solution, int n,
                                                const CallSite& site) {
  if (n < 1) throw InvalidArgument("verified_success needs n >= 1");
  VerifyOutcome out;
  for (int i = 0; i < n; ++i) {
    auto g = grade(problem, solution.proof_text, problem_hints(problem), site, nullptr, "verify");
    bool clean = g.perfect();
    out.grades.push_back(std::move(g));
    if (!clean) return out;
  }
  out.success = true;
  return out;
}

CandidateSolution DialecticEngine::run_branch(const Problem& problem, const SolveContext& ctx,
                                              const CallSite& site, Origin origin) {
  Usd cost;
  const std::string materials = ctx.serialize();

  auto draft = solver_call(problem, materials, site);
  cost += draft.usd;
  std::string proof = extract_proof_text(draft.text);
  record(site, "draft", json{{"redraft", false}, {"chars", proof.size()}, {"digest", short_digest(proof)}}, &draft);

  auto issues = lazy_phrase_check(proof, site, &cost);
  if (!issues.empty()) {
    SolveContext again = ctx;
    again.feedback.push_back("Derive explicitly");
    for (const auto& i : issues) again.feedback.push_back(i);
    auto redraft = solver_call(problem, again.serialize(), site);
    cost += redraft.usd;
    proof = extract_proof_text(redraft.text);
    record(site, "draft", json{{"redraft", true}, {"chars", proof.size()}, {"digest", short_digest(proof)}},
           &redraft);
  }

  const std::string hints = problem_hints(problem);
  GradeReport first = grade(problem, proof, hints, site, &cost, "grade");

  SolveContext refine_ctx = ctx;
  refine_ctx.notes.push_back({"Previous draft (to be refined)", proof});
  refine_ctx.notes.push_back({"Grader feedback on the previous draft", format_grade_feedback(first)});
  auto refined = solver_call(problem, refine_ctx.serialize(), site);
  cost += refined.usd;
  std::string refined_proof = extract_proof_text(refined.text);
  record(site, "refine", json{{"chars", refined_proof.size()}, {"digest", short_digest(refined_proof)}},
         &refined);

  GradeReport second = grade(problem, refined_proof, hints, site, &cost, "regrade");

  CandidateSolution s;
  s.problem_id = problem.id;
  s.proof_text = refined_proof.empty() ? proof : refined_proof;
  s.origin = origin;
  s.phase = site.phase;
  s.grade = std::move(second);
  s.context_digest = ctx.digest();
  s.cost = cost;
  return s;
}

SolveResult DialecticEngine::solve(const Problem& problem, const SolveContext& ctx, int count,
                                   const CallSite& site, const SolveOptions& options) {
  if (count < 1) throw InvalidArgument("dialectic solve needs count >= 1");
  return solve_each(problem, std::vector<BranchSpec>(static_cast<std::size_t>(count), {ctx, options.origin}), site,
                    options);
}

SolveResult DialecticEngine::solve_each(const Problem& problem, const std::vector<BranchSpec>& branches,
                                        const CallSite& site, const SolveOptions& options) {
  if (branches.empty()) throw InvalidArgument("dialectic solve needs at least one branch");
  problem.validate();
  const auto n = branches.size();
  std::vector<std::optional<CandidateSolution>> results(n);
  std::vector<EventBuffer> buffers(n);

  auto errors = parallel_for(n, config_.max_workers, [&](std::size_t i) {
    CallSite branch = site.sub("b" + std::to_string(i + 1));
    branch.events = &buffers[i];
    results[i] = run_branch(problem, branches[i].context, branch, branches[i].origin);
  });

  SolveResult out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string lane = site.sub("b" + std::to_string(i + 1)).lane;
    if (errors[i]) {
      std::string reason;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const PoolExhausted& e) {
        reason = std::string("pool exhausted: ") + e.what();
      } catch (const BudgetExceeded& e) {
        out.budget_exhausted = true;
        reason = std::string("budget exhausted: ") + e.what();
      } catch (const Error& e) {
        reason = e.what();
      }
      buffers[i].add(site.phase, "branch_dropped", lane, json{{"reason", reason}});
      out.dropped.push_back("b" + std::to_string(i + 1) + ": " + reason);
    }
    if (site.events) site.events->append(buffers[i].take());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) continue;
    CandidateSolution s = std::move(*results[i]);
    s.id = options.next_id ? options.next_id() : site.sub("b" + std::to_string(i + 1)).lane;
    out.solutions.push_back(std::move(s));
  }
  return out;
}

}  // namespace proofloop::dialectic
