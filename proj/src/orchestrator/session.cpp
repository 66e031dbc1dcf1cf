#include "proofloop/orchestrator/session.hpp"

#include <sstream>

#include "proofloop/core/errors.hpp"
#include "proofloop/core/json.hpp"
#include "proofloop/core/parallel.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace proofloop::orchestrator {
namespace {

std::string describe(const TraceEvent& e) {
  std::ostringstream out;
  out << e.kind << " (phase " << e.phase << ", lane '" << e.lane << "', digest " << e.digest << ")";
  return out.str();
}

std::vector<TraceEvent> comparable(const std::vector<TraceEvent>& events, const std::string& run) {
  std::vector<TraceEvent> out;
  for (const auto& e : events) {
    if (e.run == run && e.kind != "checkpoint") out.push_back(e);
  }
  return out;
}

}  // namespace

std::vector<std::string> default_run_ids(int runs) {
  std::vector<std::string> out;
  for (int i = 1; i <= runs; ++i) out.push_back("run" + std::to_string(i));
  return out;
}

Session::Session(gateway::Gateway& gateway, const prompts::PromptRegistry& prompts)
    : gateway_(gateway), prompts_(prompts) {}

std::string Session::script_digest() const {
  if (const auto* s = dynamic_cast<const gateway::ScriptedBackend*>(&gateway_.backend())) return s->script().digest();
  return "";
}

TraceHeader Session::header_for(const Problem& problem, const PipelineConfig& config,
                                const std::vector<std::string>& runs) const {
  TraceHeader h;
  h.problem = problem;
  h.config = config;
  h.runs = runs;
  h.prompts_version = prompts_.version();
  h.backend_kind = gateway_.backend().kind();
  h.backend_id = gateway_.backend().id();
  h.prices = gateway_.prices();
  if (const auto* s = dynamic_cast<const gateway::ScriptedBackend*>(&gateway_.backend())) {
    h.script = s->script().to_json();
    h.script_digest = s->script().digest();
  }
  return h;
}

SessionResult Session::run(const Problem& problem, const PipelineConfig& config, int runs,
                           const SessionOptions& options) {
  if (runs < 1) throw InvalidArgument("a session needs at least one run");
  problem.validate();
  config.validate();
  auto header = header_for(problem, config, default_run_ids(runs));
  return drive(header, std::vector<std::optional<Checkpoint>>(header.runs.size()), {}, options);
}

SessionResult Session::drive(const TraceHeader& header, std::vector<std::optional<Checkpoint>> starts,
                             const std::vector<TraceEvent>& prefix, const SessionOptions& options) {
  std::optional<TraceSink> file_sink;
  std::optional<TraceSink> memory_sink;
  if (options.out_dir) {
    file_sink.emplace(*options.out_dir / "trace.jsonl");
  } else {
    memory_sink.emplace();
  }
  TraceSink& sink = file_sink ? *file_sink : *memory_sink;
  sink.start(header);
  for (const auto& e : prefix) sink.write(e);

  dialectic::DialecticEngine engine(gateway_, prompts_, header.config);
  conjecture::ConjectureEngine conjectures(engine);
  RunEnv env{engine, conjectures, sink, options.out_dir, header.script_digest};

  const std::size_t n = header.runs.size();
  std::vector<std::optional<PipelineResult>> results(n);
  auto errors = parallel_for(n, static_cast<int>(n), [&](std::size_t i) {
    auto pipeline = starts[i] ? Pipeline(env, *starts[i])
                              : Pipeline(env, Pipeline::initial_state(header.runs[i], header.problem, header.config));
    results[i] = pipeline.run();
  });
  rethrow_first(errors);

  SessionResult out;
  for (auto& r : results) out.runs.push_back(std::move(*r));

  EventBuffer buffer;
  std::optional<std::size_t> winner;
  int match = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.runs[i].solution) continue;
    if (!winner) {
      winner = i;
      continue;
    }
    const auto& a = out.runs[*winner];
    const auto& b = out.runs[i];
    RunSummary sa{a.run_id, *a.solution, a.state.solution_memory};
    RunSummary sb{b.run_id, *b.solution, b.state.solution_memory};
    dialectic::CallSite site{kSessionRun, "judge/m" + std::to_string(++match), 0, nullptr, &buffer};
    JudgeDecision d;
    try {
      d = judge(engine, header.problem, sa, sb, site);
    } catch (const BudgetExceeded& e) {
      d.fallback = true;
      d.winner = better_candidate(*b.solution, *a.solution) ? Side::B : Side::A;
      buffer.add(0, "judge_fallback", site.lane, json{{"reason", e.what()}});
    }
    if (d.winner == Side::B) winner = i;
    out.judgements.push_back(std::move(d));
  }

  out.budget_exhausted = gateway_.exhausted();
  for (const auto& r : out.runs) out.budget_exhausted = out.budget_exhausted || r.budget_exhausted;
  if (winner) {
    const auto& w = out.runs[*winner];
    out.solution = w.solution;
    out.winner_run = w.run_id;
    out.verified = w.verified;
    out.termination = w.verified ? Termination::verified
                      : out.budget_exhausted ? Termination::budget_exhausted
                                             : w.termination;
  } else {
    out.termination = out.budget_exhausted ? Termination::budget_exhausted : Termination::best_effort;
  }

  json end{{"termination", to_string(out.termination)}, {"verified", out.verified}, {"winner_run", out.winner_run}};
  if (out.solution) end["solution"] = out.solution->id;
  buffer.add(0, "session_end", "", std::move(end));
  std::uint64_t seq = 0;
  for (auto& e : buffer.take()) {
    e.run = kSessionRun;
    e.seq = ++seq;
    e.budget_remaining = gateway_.remaining();
    sink.write(e);
  }
  out.events = sink.events();
  return out;
}

SessionResult Session::resume(const fs::path& trace, const std::optional<std::string>& checkpoint_id,
                              const SessionOptions& options) {
  auto tf = read_trace(trace);
  const auto& h = tf.header;
  if (h.prompts_version != prompts_.version()) {
    throw ResumeError("trace was made with prompt templates " + h.prompts_version + ", current are " +
                      prompts_.version());
  }
  if (h.backend_id != gateway_.backend().id()) {
    throw ResumeError("trace backend '" + h.backend_id + "' differs from '" + gateway_.backend().id() + "'");
  }
  if (h.script_digest != script_digest()) throw ResumeError("the script differs from the one the trace was made with");
  if (gateway_.ledger().size() != 0) throw InvalidArgument("resume needs a gateway with an empty ledger");

  const fs::path base = trace.parent_path();
  bool named_found = false;
  std::vector<std::optional<Checkpoint>> starts;
  std::vector<TraceEvent> prefix;
  std::vector<gateway::CostEntry> ledger;
  json cursors = json::array();
  std::vector<std::string> files;

  for (const auto& run : h.runs) {
    const TraceEvent* chosen = nullptr;
    for (const auto& e : tf.events) {
      if (e.run != run || e.kind != "checkpoint") continue;
      if (checkpoint_id && e.data.value("id", "") == *checkpoint_id) {
        chosen = &e;
        named_found = true;
        break;
      }
      chosen = &e;  // latest so far
    }
    if (!chosen) throw ResumeError("no checkpoint recorded for " + run);
    const std::string file = chosen->data.value("file", "");
    auto cp = load_checkpoint(base / file);
    if (cp.state.run_id != run || cp.id != chosen->data.value("id", "")) {
      throw ResumeError("checkpoint " + file + " does not belong to " + run);
    }
    if (cp.prompts_version != prompts_.version()) throw ResumeError("checkpoint " + cp.id + " has other templates");
    if (cp.script_digest != h.script_digest) throw ResumeError("checkpoint " + cp.id + " has another script");

    for (const auto& e : tf.events) {
      if (e.run != run || e.seq > cp.trace_seq) continue;
      prefix.push_back(e);
      if (e.kind == "checkpoint") files.push_back(e.data.value("file", ""));
    }
    ledger.insert(ledger.end(), cp.ledger.begin(), cp.ledger.end());
    for (const auto& c : cp.backend_state.value("cursors", json::array())) cursors.push_back(c);
    starts.push_back(std::move(cp));
  }
  if (checkpoint_id && !named_found) throw ResumeError("checkpoint '" + *checkpoint_id + "' is not in the trace");

  if (options.out_dir && fs::weakly_canonical(*options.out_dir) != fs::weakly_canonical(base)) {
    for (const auto& f : files) {
      fs::create_directories((*options.out_dir / f).parent_path());
      fs::copy_file(base / f, *options.out_dir / f, fs::copy_options::overwrite_existing);
    }
  } else if (options.out_dir) {
    throw InvalidArgument("resume output must go to a different directory than the trace");
  }

  gateway_.restore_ledger(std::move(ledger));
  gateway_.backend().restore(json{{"cursors", cursors}});
  return drive(h, std::move(starts), prefix, options);
}

std::string ReplayReport::render() const {
  std::ostringstream out;
  if (!prompts_note.empty()) out << "note: " << prompts_note << "\n";
  if (identical) {
    out << "identical (" << compared << " events)\n";
  } else if (divergence) {
    out << "diverged in " << divergence->run << " at event " << divergence->index << "\n"
        << "  expected: " << divergence->expected << "\n"
        << "  actual:   " << divergence->actual << "\n";
  }
  return out.str();
}

ReplayReport replay(const fs::path& trace, const prompts::PromptRegistry& prompts,
                    const std::optional<gateway::Script>& script) {
  auto tf = read_trace(trace);
  const auto& h = tf.header;
  if (h.backend_kind != "scripted") {
    throw ReplayRefused("trace was made with a '" + h.backend_kind +
                        "' backend; only scripted runs are deterministic enough to replay");
  }
  auto s = script ? *script : gateway::Script::from_json(h.script);
  auto backend = std::make_shared<gateway::ScriptedBackend>(s);
  gateway::PriceTable prices;
  prices.set(h.backend_id, h.prices);
  prices.set(backend->id(), h.prices);
  gateway::GatewayOptions go;
  go.token_budget = h.config.token_budget;
  go.strict_budget = h.config.strict_budget;
  go.backoff_base = std::chrono::milliseconds(0);
  gateway::Gateway gw(backend, prices, go);

  ReplayReport report;
  if (h.prompts_version != prompts.version()) {
    report.prompts_note = "trace templates " + h.prompts_version + ", current " + prompts.version();
  }
  if (h.runs != default_run_ids(static_cast<int>(h.runs.size()))) throw SchemaError("unexpected run ids in trace");
  auto fresh = Session(gw, prompts).run(h.problem, h.config, static_cast<int>(h.runs.size()));

  auto streams = h.runs;
  streams.push_back(kSessionRun);
  for (const auto& run : streams) {
    auto expected = comparable(tf.events, run);
    auto actual = comparable(fresh.events, run);
    const std::size_t common = std::min(expected.size(), actual.size());
    for (std::size_t i = 0; i <= common; ++i) {
      if (i == common) {
        if (expected.size() == actual.size()) break;
        report.divergence = Divergence{run, i, i < expected.size() ? describe(expected[i]) : "<end of run>",
                                       i < actual.size() ? describe(actual[i]) : "<end of run>"};
        return report;
      }
      ++report.compared;
      if (!expected[i].same_content(actual[i])) {
        report.divergence = Divergence{run, i, describe(expected[i]), describe(actual[i])};
        return report;
      }
    }
  }
  report.identical = true;
  return report;
}

std::string ledger_fingerprint(const gateway::CostLedger& ledger) {
  json out = json::array();
  for (auto e : ledger.canonical_entries()) {
    e.seq = 0;
    out.push_back(e);
  }
  return out.dump();
}

std::map<Role, std::int64_t> call_ceiling(const PipelineConfig& c, int runs) {
  const std::int64_t K = c.solver_width, N = c.verify_repeats, k = c.extraction_budget;
  const std::int64_t L0 = c.initial_iterations, L = c.conjecture_iterations;
  const std::int64_t guided = std::max<std::int64_t>(1, K - 1) + 1;
  // Per branch: draft, optional redraft and refine; one censor; grade and regrade.
  auto branches = [&](std::int64_t b, std::map<Role, std::int64_t>& m, bool verify) {
    m[Role::solver] += 3 * b;
    m[Role::processor] += b;
    m[Role::grader] += 2 * b + (verify ? b * N : 0);
  };
  auto conjecture_round = [&](std::map<Role, std::int64_t>& m) {
    m[Role::extractor] += 1;
    m[Role::parser] += 2;
    m[Role::solver] += 2 * k;
    m[Role::grader] += 2 * k;
  };
  std::map<Role, std::int64_t> run;
  for (std::int64_t i = 0; i < L0; ++i) branches(K, run, true);
  for (std::int64_t i = 0; i < L; ++i) {
    conjecture_round(run);
    branches(guided, run, true);
  }
  run[Role::grader] += N;  // incumbent check
  conjecture_round(run);
  conjecture_round(run);
  branches(K, run, false);
  run[Role::grader] += N;  // challenger check

  std::map<Role, std::int64_t> out;
  for (const auto& [role, n] : run) out[role] = n * runs;
  out[Role::judge] = 2 * std::max(0, runs - 1);
  return out;
}

}  // namespace proofloop::orchestrator
