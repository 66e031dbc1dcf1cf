#include "proofloop/orchestrator/pipeline.hpp"

#include <array>
#include <chrono>
#include <cstdio>

#include "proofloop/core/digest.hpp"
#include "proofloop/core/errors.hpp"
#include "proofloop/core/json.hpp"
#include "proofloop/core/parallel.hpp"
#include "proofloop/orchestrator/selection.hpp"

using nlohmann::json;

namespace proofloop::orchestrator {
namespace {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

json brief(const CandidateSolution& s) {
  return json{{"id", s.id}, {"score", s.score()}, {"digest", short_digest(s.proof_text)}};
}

// Keeps only the scripted cursors that belong to `run_id`.
json run_cursors(const json& snapshot, const std::string& run_id) {
  if (!snapshot.contains("cursors")) return snapshot;
  json kept = json::array();
  const std::string prefix = run_id + "|";
  for (const auto& c : snapshot.at("cursors")) {
    if (c.value("key", "").rfind(prefix, 0) == 0) kept.push_back(c);
  }
  return json{{"cursors", kept}};
}

// True when nothing but the problem's own materials is in the context.
bool memory_free(const dialectic::SolveContext& ctx) {
  auto copy = ctx;
  copy.hints.reset();
  return copy.empty();
}

struct CheckResult {
  std::vector<int> scores;
  std::vector<GradeReport> reports;
  bool all_perfect = true;
  int sum() const {
    int s = 0;
    for (int v : scores) s += v;
    return s;
  }
};

}  // namespace

Pipeline::Pipeline(RunEnv env, RunState state) : env_(std::move(env)), state_(std::move(state)) {}

Pipeline::Pipeline(RunEnv env, const Checkpoint& from)
    : env_(std::move(env)), state_(from.state), seq_(from.trace_seq), next_checkpoint_(from.index + 1) {}

RunState Pipeline::initial_state(const std::string& run_id, const Problem& problem, const PipelineConfig& config) {
  problem.validate();
  config.validate();
  RunState s;
  s.run_id = run_id;
  s.problem = problem;
  s.config = config;
  return s;
}

dialectic::CallSite Pipeline::site(int phase, const std::string& lane) {
  return dialectic::CallSite{state_.run_id, lane, phase, nullptr, &buffer_};
}

void Pipeline::emit(int phase, const std::string& kind, const std::string& lane, json data) {
  buffer_.add(phase, kind, lane, std::move(data));
}

void Pipeline::commit() {
  for (auto& e : buffer_.take()) {
    e.run = state_.run_id;
    e.seq = ++seq_;
    e.ts_ms = now_ms();
    e.budget_remaining = env_.engine.gateway().remaining();
    env_.sink.write(e);
  }
}

void Pipeline::checkpoint() {
  if (!env_.out_dir) return;
  char id[96];
  std::snprintf(id, sizeof id, "%s-cp%03d", state_.run_id.c_str(), next_checkpoint_);
  const std::string rel = std::string("checkpoints/") + id + ".json";
  emit(0, "checkpoint", "", json{{"id", id}, {"file", rel}, {"stage", to_string(state_.stage)}});
  commit();

  Checkpoint cp;
  cp.id = id;
  cp.index = next_checkpoint_++;
  cp.prompts_version = env_.engine.prompts().version();
  cp.backend_id = env_.engine.gateway().backend().id();
  cp.script_digest = env_.script_digest;
  cp.state = state_;
  cp.ledger = env_.engine.gateway().ledger().entries_for_run(state_.run_id);
  cp.backend_state = run_cursors(env_.engine.gateway().backend().snapshot(), state_.run_id);
  cp.trace_seq = seq_;
  save_checkpoint(*env_.out_dir / rel, cp);
}

PipelineResult Pipeline::run() {
  if (state_.stage == Stage::done) return result();
  if (seq_ == 0) {
    emit(0, "run_start", "",
         json{{"problem", state_.problem.id}, {"config", json(state_.config)}, {"prompts", env_.engine.prompts().version()}});
    commit();
    checkpoint();
  }
  while (state_.stage != Stage::done) {
    try {
      if (env_.engine.gateway().exhausted()) throw BudgetExceeded("run-wide token budget exhausted");
      switch (state_.stage) {
        case Stage::phase1: phase1_step(); break;
        case Stage::phase2: phase2_step(); break;
        case Stage::phase3: phase3_step(); break;
        case Stage::phase4: phase4_step(); break;
        case Stage::done: break;
      }
    } catch (const BudgetExceeded& e) {
      state_.budget_exhausted = true;
      emit(0, "budget_exhausted", "", json{{"stage", to_string(state_.stage)}, {"reason", e.what()}});
      finish(Termination::budget_exhausted);
    }
    commit();
    checkpoint();
  }
  return result();
}

PipelineResult Pipeline::result() const {
  return PipelineResult{state_.run_id,  state_.final_solution,   state_.termination,
                        state_.verified, state_.budget_exhausted, state_};
}

void Pipeline::finish(Termination t) {
  if (!state_.final_solution && !state_.solution_memory.empty()) {
    state_.final_solution = best(state_.solution_memory);
  }
  state_.termination = t;
  state_.stage = Stage::done;
  json data{{"termination", to_string(t)}, {"verified", state_.verified}};
  if (state_.final_solution) data["solution"] = brief(*state_.final_solution);
  emit(0, "run_end", "", std::move(data));
}

bool Pipeline::solve_round(int phase, const std::string& lane, const std::vector<dialectic::BranchSpec>& specs) {
  const auto& cfg = state_.config;
  json plan = json::array();
  for (const auto& b : specs) {
    plan.push_back(json{{"origin", to_string(b.origin)}, {"memory_free", memory_free(b.context)},
                        {"context", b.context.digest()}});
  }
  emit(phase, "solve_plan", lane, json{{"branches", plan}});

  dialectic::SolveOptions options;
  options.next_id = [&] { return state_.next_solution_id(phase); };
  auto r = env_.engine.solve_each(state_.problem, specs, site(phase, lane), options);

  json made = json::array();
  for (const auto& s : r.solutions) {
    state_.solution_memory.push_back(s);
    made.push_back(brief(s));
  }
  emit(phase, "solutions", lane, json{{"solutions", made}, {"dropped", r.dropped}});
  if (r.budget_exhausted) throw BudgetExceeded("budget ran out during a solve");

  int v = 0;
  for (const auto& s : distinct_ranked(r.solutions)) {
    if (!s.grade || !s.grade->perfect()) continue;
    const std::string vlane = lane + "/v" + std::to_string(++v);
    dialectic::VerifyOutcome out;
    std::string error;
    try {
      out = env_.engine.verified_success(state_.problem, s, cfg.verify_repeats, site(phase, vlane));
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& e) {
      error = e.what();
    }
    json data = brief(s);
    data["success"] = out.success;
    data["grades"] = out.grades.size();
    if (!error.empty()) data["error"] = error;
    emit(phase, "verify_result", vlane, std::move(data));
    if (out.success) {
      state_.final_solution = s;
      state_.verified = true;
      return true;
    }
  }
  return false;
}

dialectic::SolveContext Pipeline::guided_context() const {
  auto ctx = select_kth_top(state_.solution_memory, 1);
  ctx.hints = state_.problem.additional_materials;
  ctx.lemmas = state_.lemma_memory;
  ctx.failures = state_.failure_context;
  return ctx;
}

void Pipeline::phase1_step() {
  const auto& cfg = state_.config;
  const int it = state_.phase1_iter + 1;
  // Contexts come from the memory as it stood before this iteration.
  std::vector<dialectic::BranchSpec> specs;
  specs.push_back({dialectic::SolveContext::for_problem(state_.problem), Origin::fresh});
  for (int k = 1; k < cfg.solver_width; ++k) {
    auto ctx = select_kth_top(state_.solution_memory, k);
    const Origin origin = ctx.empty() ? Origin::fresh : Origin::contextual;
    ctx.hints = state_.problem.additional_materials;
    specs.push_back({std::move(ctx), origin});
  }
  const bool verified = solve_round(1, "p1/i" + std::to_string(it), specs);
  state_.phase1_iter = it;
  if (verified) {
    finish(Termination::verified);
  } else if (it >= cfg.initial_iterations) {
    state_.stage = cfg.conjecture_iterations > 0 ? Stage::phase2 : Stage::phase4;
  }
}

void Pipeline::phase2_step() {
  const auto& cfg = state_.config;
  const int it = state_.conjecture_iter + 1;
  const std::string lane = "p2/i" + std::to_string(it);
  state_.latest_partial_progress.clear();
  state_.stage = Stage::phase3;

  auto seeds = select_top(state_.solution_memory, cfg.seed_count);
  if (seeds.empty()) {
    emit(2, "extract_failed", lane, json{{"error", "no seeds"}});
    return;
  }
  conjecture::ExtractOptions options;
  options.max_pairs = cfg.extraction_budget;
  options.next_id = [&] { return state_.next_pair_id(); };
  conjecture::ExtractionResult extracted;
  try {
    extracted = env_.conjectures.extract_hypotheses(state_.problem, seeds, state_.lemma_memory,
                                                    state_.failure_context, site(2, lane), options);
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const Error& e) {
    // Phase 3 still runs on what memory already holds.
    emit(2, "extract_failed", lane, json{{"error", e.what()}});
    return;
  }

  auto verified = env_.conjectures.verify_hypotheses(extracted.pairs, cfg.threshold, site(2, lane));
  json proven = json::array(), failed = json::array();
  for (const auto& l : verified.proven) {
    proven.push_back(json{{"pair", l.pair_id}, {"polarity", to_string(l.polarity)}});
    state_.lemma_memory.push_back(l);
  }
  for (const auto& f : verified.failed) {
    failed.push_back(json{{"pair", f.pair.id}, {"reason", to_string(f.reason)}});
    state_.failure_context.push_back(f);
  }
  state_.latest_partial_progress = verified.failed;
  emit(2, "hypotheses", lane, json{{"proven", proven}, {"failed", failed}});
  if (verified.budget_exhausted) throw BudgetExceeded("budget ran out while verifying conjectures");
}

void Pipeline::phase3_step() {
  const auto& cfg = state_.config;
  const int it = state_.conjecture_iter + 1;
  std::vector<dialectic::BranchSpec> specs;
  const auto guided = guided_context();
  for (int k = 0; k < std::max(1, cfg.solver_width - 1); ++k) specs.push_back({guided, Origin::guided});
  // One solve without memory keeps the pool diverse.
  specs.push_back({dialectic::SolveContext::for_problem(state_.problem), Origin::fresh});
  const bool verified = solve_round(3, "p3/i" + std::to_string(it), specs);
  state_.conjecture_iter = it;
  if (verified) {
    finish(Termination::verified);
  } else if (it >= cfg.conjecture_iterations) {
    state_.stage = Stage::phase4;
  } else {
    state_.stage = Stage::phase2;
  }
}

void Pipeline::phase4_step() {
  const auto& cfg = state_.config;
  if (state_.solution_memory.empty()) {
    finish(Termination::best_effort);
    return;
  }

  auto check = [&](const CandidateSolution& s, const std::string& lane) {
    CheckResult out;
    for (int i = 0; i < cfg.verify_repeats; ++i) {
      try {
        auto g = env_.engine.grade(state_.problem, s.proof_text, state_.problem.additional_materials.value_or(""),
                                   site(4, lane), nullptr, "check");
        out.all_perfect = out.all_perfect && g.perfect();
        out.scores.push_back(g.score());
        out.reports.push_back(std::move(g));
      } catch (const GradeParseFailure&) {
        out.all_perfect = false;
        out.scores.push_back(0);
      }
    }
    return out;
  };

  const CandidateSolution incumbent = distinct_ranked(state_.solution_memory).front();
  const CheckResult first = check(incumbent, "p4/check");
  if (first.all_perfect) {
    state_.final_solution = incumbent;
    state_.verified = true;
    emit(4, "post_enhance", "p4", json{{"incumbent", brief(incumbent)}, {"check_sum", first.sum()}, {"winner", incumbent.id}});
    finish(Termination::verified);
    return;
  }

  dialectic::ContextNote reports{"Independent grading reports", ""};
  for (std::size_t i = 0; i < first.reports.size(); ++i) {
    reports.text += "Report " + std::to_string(i + 1) + ":\n" + dialectic::format_grade_feedback(first.reports[i]) + "\n";
  }

  // Two extract + verify sessions side by side; their lemmas merge.
  constexpr std::size_t kSessions = 2;
  std::array<EventBuffer, kSessions> buffers;
  std::array<conjecture::VerifyResult, kSessions> found;
  std::array<std::string, kSessions> errors;
  auto thrown = parallel_for(kSessions, static_cast<int>(kSessions), [&](std::size_t i) {
    const std::string lane = "p4/s" + std::to_string(i + 1);
    dialectic::CallSite s{state_.run_id, lane, 4, nullptr, &buffers[i]};
    conjecture::ExtractOptions options;
    options.max_pairs = cfg.extraction_budget;
    options.notes = {reports};
    options.next_id = [&, n = 0]() mutable { return state_.run_id + "-p4s" + std::to_string(i + 1) + "-h" + std::to_string(++n); };
    try {
      auto ex = env_.conjectures.extract_hypotheses(state_.problem, {incumbent}, state_.lemma_memory,
                                                    state_.failure_context, s, options);
      found[i] = env_.conjectures.verify_hypotheses(ex.pairs, cfg.enhancement_threshold, s);
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  bool out_of_budget = false;
  for (std::size_t i = 0; i < kSessions; ++i) {
    buffer_.append(buffers[i].take());
    if (thrown[i]) {
      try {
        std::rethrow_exception(thrown[i]);
      } catch (const BudgetExceeded&) {
        out_of_budget = true;
      }
    }
    if (!errors[i].empty()) emit(4, "extract_failed", "p4/s" + std::to_string(i + 1), json{{"error", errors[i]}});
    out_of_budget = out_of_budget || found[i].budget_exhausted;
    for (const auto& l : found[i].proven) state_.lemma_memory.push_back(l);
    for (const auto& f : found[i].failed) state_.failure_context.push_back(f);
  }
  if (out_of_budget) throw BudgetExceeded("budget ran out while verifying gap conjectures");

  auto ctx = guided_context();
  std::vector<dialectic::BranchSpec> specs(static_cast<std::size_t>(cfg.solver_width),
                                           dialectic::BranchSpec{ctx, Origin::post_enhanced});
  dialectic::SolveOptions options;
  options.next_id = [&] { return state_.next_solution_id(4); };
  auto r = env_.engine.solve_each(state_.problem, specs, site(4, "p4/b"), options);
  json made = json::array();
  for (const auto& s : r.solutions) {
    state_.solution_memory.push_back(s);
    made.push_back(brief(s));
  }
  emit(4, "solutions", "p4/b", json{{"solutions", made}, {"dropped", r.dropped}});
  if (r.budget_exhausted) throw BudgetExceeded("budget ran out during the post-enhancement solve");

  json summary{{"incumbent", brief(incumbent)}, {"check_sum", first.sum()}};
  CandidateSolution chosen = incumbent;
  bool chosen_perfect = false;
  if (!r.solutions.empty()) {
    const CandidateSolution challenger = distinct_ranked(r.solutions).front();
    const CheckResult second = check(challenger, "p4/recheck");
    summary["challenger"] = brief(challenger);
    summary["challenger_sum"] = second.sum();
    // Equal repeat counts, so comparing sums compares means.
    if (second.sum() > first.sum()) {
      chosen = challenger;
      chosen_perfect = second.all_perfect;
    }
  }
  summary["winner"] = chosen.id;
  emit(4, "post_enhance", "p4", std::move(summary));
  state_.final_solution = chosen;
  state_.verified = chosen_perfect;
  finish(chosen_perfect ? Termination::verified : Termination::post_enhanced);
}

}  // namespace proofloop::orchestrator
