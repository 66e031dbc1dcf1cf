#include "proofloop/core/json.hpp"

#include "proofloop/core/errors.hpp"

using nlohmann::json;

namespace proofloop {
namespace {

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

json role_map(const std::map<Role, double>& m) {
  json out = json::object();
  for (const auto& [r, v] : m) out[std::string(to_string(r))] = v;
  return out;
}

}  // namespace

void to_json(json& j, const Problem& p) {
  j = json{{"id", p.id},
           {"statement", p.statement},
           {"additional_materials", optional_to_json(p.additional_materials)}};
}

void from_json(const json& j, Problem& p) {
  p.id = j.at("id").get<std::string>();
  p.statement = j.at("statement").get<std::string>();
  p.additional_materials = optional_from_json<std::string>(j, "additional_materials");
}

void to_json(json& j, const Issue& i) {
  j = json{{"text", i.text}, {"severity", std::string(to_string(i.severity))}};
}

void from_json(const json& j, Issue& i) {
  i.text = j.at("text").get<std::string>();
  i.severity = severity_from_string(j.at("severity").get<std::string>());
}

void to_json(json& j, const CandidateSolution& s) {
  j = json{{"id", s.id},
           {"problem_id", s.problem_id},
           {"proof_text", s.proof_text},
           {"origin", std::string(to_string(s.origin))},
           {"phase", s.phase},
           {"grade", s.grade ? json(*s.grade) : json(nullptr)},
           {"context_digest", s.context_digest},
           {"cost_usd", s.cost.to_string()}};
}

void from_json(const json& j, CandidateSolution& s) {
  s.id = j.at("id").get<std::string>();
  s.problem_id = j.at("problem_id").get<std::string>();
  s.proof_text = j.at("proof_text").get<std::string>();
  s.origin = origin_from_string(j.at("origin").get<std::string>());
  s.phase = j.at("phase").get<int>();
  if (j.contains("grade") && !j.at("grade").is_null()) {
    s.grade = j.at("grade").get<GradeReport>();
  } else {
    s.grade.reset();
  }
  s.context_digest = j.value("context_digest", "");
  s.cost = Usd::parse(j.value("cost_usd", "0"));
}

void to_json(json& j, const HypothesisPair& p) {
  j = json{{"id", p.id},
           {"conjecture", p.conjecture},
           {"negation", p.negation},
           {"source_solution_ids", p.source_solution_ids}};
}

void from_json(const json& j, HypothesisPair& p) {
  p.id = j.at("id").get<std::string>();
  p.conjecture = j.at("conjecture").get<std::string>();
  p.negation = j.at("negation").get<std::string>();
  p.source_solution_ids = j.value("source_solution_ids", std::vector<std::string>{});
}

void to_json(json& j, const Lemma& l) {
  j = json{{"statement", l.statement}, {"polarity", std::string(to_string(l.polarity))},
           {"proof_text", l.proof_text}, {"g_pos", l.g_pos},
           {"g_neg", l.g_neg},           {"pair_id", l.pair_id},
           {"threshold", l.threshold}};
}

void from_json(const json& j, Lemma& l) {
  l.statement = j.at("statement").get<std::string>();
  l.polarity = polarity_from_string(j.at("polarity").get<std::string>());
  l.proof_text = j.at("proof_text").get<std::string>();
  l.g_pos = j.at("g_pos").get<int>();
  l.g_neg = j.at("g_neg").get<int>();
  l.pair_id = j.at("pair_id").get<std::string>();
  l.threshold = j.value("threshold", 7);
}

void to_json(json& j, const FailedPair& f) {
  j = json{{"pair", f.pair},
           {"reason", std::string(to_string(f.reason))},
           {"g_pos", optional_to_json(f.g_pos)},
           {"g_neg", optional_to_json(f.g_neg)},
           {"pos_attempt", f.pos_attempt},
           {"neg_attempt", f.neg_attempt},
           {"detail", f.detail}};
}

void from_json(const json& j, FailedPair& f) {
  f.pair = j.at("pair").get<HypothesisPair>();
  f.reason = failure_reason_from_string(j.at("reason").get<std::string>());
  f.g_pos = optional_from_json<int>(j, "g_pos");
  f.g_neg = optional_from_json<int>(j, "g_neg");
  f.pos_attempt = j.value("pos_attempt", "");
  f.neg_attempt = j.value("neg_attempt", "");
  f.detail = j.value("detail", "");
}

void to_json(json& j, const PipelineConfig& c) {
  json max_out = json::object();
  for (const auto& [r, v] : c.max_output_tokens) max_out[std::string(to_string(r))] = v;
  json graders = json::object();
  for (const auto& [phase, v] : c.grader_by_phase) {
    graders[std::to_string(phase)] = v == GraderVariant::council ? "council" : "simplified";
  }
  j = json{{"initial_iterations", c.initial_iterations},
           {"conjecture_iterations", c.conjecture_iterations},
           {"solver_width", c.solver_width},
           {"threshold", c.threshold},
           {"enhancement_threshold", c.enhancement_threshold},
           {"verify_repeats", c.verify_repeats},
           {"extraction_budget", c.extraction_budget},
           {"parallel_runs", c.parallel_runs},
           {"seed_count", c.seed_count},
           {"memory_prompt_cap", c.memory_prompt_cap},
           {"post_enhance_sessions", c.post_enhance_sessions},
           {"token_budget", c.token_budget},
           {"strict_budget", c.strict_budget},
           {"pair_token_budget", c.pair_token_budget},
           {"max_workers", c.max_workers},
           {"temperatures", role_map(c.temperatures)},
           {"max_output_tokens", max_out},
           {"grader_by_phase", graders},
           {"use_engineered_solver", c.use_engineered_solver},
           {"trace_prompts", c.trace_prompts}};
}

void from_json(const json& j, PipelineConfig& c) {
  c = PipelineConfig::pb_adv_defaults();
  c.initial_iterations = j.value("initial_iterations", c.initial_iterations);
  c.conjecture_iterations = j.value("conjecture_iterations", c.conjecture_iterations);
  c.solver_width = j.value("solver_width", c.solver_width);
  c.threshold = j.value("threshold", c.threshold);
  c.enhancement_threshold = j.value("enhancement_threshold", c.enhancement_threshold);
  c.verify_repeats = j.value("verify_repeats", c.verify_repeats);
  c.extraction_budget = j.value("extraction_budget", c.extraction_budget);
  c.parallel_runs = j.value("parallel_runs", c.parallel_runs);
  c.seed_count = j.value("seed_count", c.seed_count);
  c.memory_prompt_cap = j.value("memory_prompt_cap", c.memory_prompt_cap);
  c.post_enhance_sessions = j.value("post_enhance_sessions", c.post_enhance_sessions);
  c.token_budget = j.value("token_budget", c.token_budget);
  c.strict_budget = j.value("strict_budget", c.strict_budget);
  c.pair_token_budget = j.value("pair_token_budget", c.pair_token_budget);
  c.max_workers = j.value("max_workers", c.max_workers);
  if (j.contains("temperatures")) {
    for (const auto& [k, v] : j.at("temperatures").items()) {
      c.temperatures[role_from_string(k)] = v.get<double>();
    }
  }
  if (j.contains("max_output_tokens")) {
    for (const auto& [k, v] : j.at("max_output_tokens").items()) {
      c.max_output_tokens[role_from_string(k)] = v.get<std::int64_t>();
    }
  }
  if (j.contains("grader_by_phase")) {
    for (const auto& [k, v] : j.at("grader_by_phase").items()) {
      c.grader_by_phase[std::stoi(k)] =
          v.get<std::string>() == "council" ? GraderVariant::council : GraderVariant::simplified;
    }
  }
  c.use_engineered_solver = j.value("use_engineered_solver", c.use_engineered_solver);
  c.trace_prompts = j.value("trace_prompts", c.trace_prompts);
}

void to_json(json& j, const GradingRecord& r) {
  j = json{{"human", r.human}, {"predicted", r.predicted}};
  if (r.problem_id) j["problem_id"] = *r.problem_id;
}

void from_json(const json& j, GradingRecord& r) {
  r.human = j.at("human").get<int>();
  r.predicted = j.at("predicted").get<double>();
  r.problem_id = optional_from_json<std::string>(j, "problem_id");
}

void to_json(json& j, const RunState& s) {
  j = json{{"run_id", s.run_id},
           {"problem", s.problem},
           {"config", s.config},
           {"solution_memory", s.solution_memory},
           {"lemma_memory", s.lemma_memory},
           {"failure_context", s.failure_context},
           {"phase1_iter", s.phase1_iter},
           {"conjecture_iter", s.conjecture_iter},
           {"stage", std::string(to_string(s.stage))},
           {"latest_partial_progress", s.latest_partial_progress},
           {"next_solution_seq", s.next_solution_seq},
           {"next_pair_seq", s.next_pair_seq},
           {"final_solution", s.final_solution ? json(*s.final_solution) : json(nullptr)},
           {"verified", s.verified},
           {"budget_exhausted", s.budget_exhausted},
           {"termination", std::string(to_string(s.termination))}};
}

void from_json(const json& j, RunState& s) {
  s.run_id = j.at("run_id").get<std::string>();
  s.problem = j.at("problem").get<Problem>();
  s.config = j.at("config").get<PipelineConfig>();
  s.solution_memory = j.at("solution_memory").get<std::vector<CandidateSolution>>();
  s.lemma_memory = j.at("lemma_memory").get<std::vector<Lemma>>();
  s.failure_context = j.at("failure_context").get<std::vector<FailedPair>>();
  s.phase1_iter = j.at("phase1_iter").get<int>();
  s.conjecture_iter = j.at("conjecture_iter").get<int>();
  s.stage = stage_from_string(j.at("stage").get<std::string>());
  s.latest_partial_progress = j.value("latest_partial_progress", std::vector<FailedPair>{});
  s.next_solution_seq = j.at("next_solution_seq").get<int>();
  s.next_pair_seq = j.at("next_pair_seq").get<int>();
  if (j.contains("final_solution") && !j.at("final_solution").is_null()) {
    s.final_solution = j.at("final_solution").get<CandidateSolution>();
  } else {
    s.final_solution.reset();
  }
  s.verified = j.at("verified").get<bool>();
  s.budget_exhausted = j.at("budget_exhausted").get<bool>();
  s.termination = termination_from_string(j.at("termination").get<std::string>());
}

void to_json(json& j, const TraceEvent& e) {
  j = json{{"seq", e.seq},     {"run", e.run},   {"phase", e.phase},   {"kind", e.kind},
           {"lane", e.lane},   {"data", e.data}, {"digest", e.digest}, {"ts_ms", e.ts_ms}};
  if (e.budget_remaining) j["budget_remaining"] = *e.budget_remaining;
}

void from_json(const json& j, TraceEvent& e) {
  e.seq = j.at("seq").get<std::uint64_t>();
  e.run = j.at("run").get<std::string>();
  e.phase = j.at("phase").get<int>();
  e.kind = j.at("kind").get<std::string>();
  e.lane = j.value("lane", "");
  e.data = j.value("data", json::object());
  e.digest = j.at("digest").get<std::string>();
  e.ts_ms = j.value("ts_ms", std::int64_t{0});
  if (j.contains("budget_remaining")) e.budget_remaining = j.at("budget_remaining").get<std::int64_t>();
}

}  // namespace proofloop

namespace nlohmann {

void adl_serializer<proofloop::GradeReport>::to_json(json& j, const proofloop::GradeReport& g) {
  j = json{{"score", g.score()},
           {"issues", g.issues()},
           {"scaffolding", g.scaffolding()},
           {"transcript", g.transcript()},
           {"notes", g.notes()}};
}

proofloop::GradeReport adl_serializer<proofloop::GradeReport>::from_json(const json& j) {
  return proofloop::GradeReport::make(
      j.at("score").get<int>(), j.value("issues", std::vector<proofloop::Issue>{}),
      j.value("scaffolding", std::vector<std::string>{}), j.value("transcript", ""),
      j.value("notes", std::vector<std::string>{}));
}

}  // namespace nlohmann
