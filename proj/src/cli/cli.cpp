#include "proofloop/cli/cli.hpp"

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <nlohmann/json.hpp>

#include "proofloop/core/errors.hpp"
#include "proofloop/core/json.hpp"
#include "proofloop/gateway/scripted_backend.hpp"
#include "proofloop/metrics/metrics.hpp"
#include "proofloop/orchestrator/session.hpp"
#include "proofloop/orchestrator/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace proofloop::cli {

namespace {

// Thrown for missing or unwritable files so they map to ExitCode::io.
class IoError : public Error {
 public:
  using Error::Error;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save(const fs::path& path, const std::string& text) {
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    orchestrator::write_atomic(path, text);
  } catch (const std::exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
}

std::string trimmed(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw InvalidArgument(key + " must be an integer, got '" + value + "'");
  }
}

std::int64_t to_int64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(key + " must be an integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  throw InvalidArgument(key + " must be true or false, got '" + value + "'");
}

GraderVariant to_grader(const std::string& key, const std::string& value) {
  if (value == "simplified") return GraderVariant::simplified;
  if (value == "council") return GraderVariant::council;
  throw InvalidArgument(key + " must be simplified or council, got '" + value + "'");
}

PipelineConfig profile(const std::string& name) {
  if (name == "pb-adv") return PipelineConfig::pb_adv_defaults();
  if (name == "uniform-temperature") return PipelineConfig::uniform_temperature_profile();
  throw InvalidArgument("unknown profile '" + name + "' (pb-adv, uniform-temperature)");
}

ExitCode exit_for(Termination t) {
  switch (t) {
    case Termination::verified: return ExitCode::ok;
    case Termination::budget_exhausted: return ExitCode::budget_exhausted;
    default: return ExitCode::best_effort;
  }
}

// Flags that mirror PipelineConfig fields; unset ones leave the file value.
struct PipelineFlags {
  std::optional<std::string> profile;
  std::optional<int> l0, l, k_width, n_repeats, k_extract, tau, tau_e, runs, workers;
  std::optional<std::int64_t> budget, pair_budget;
  bool strict = false, engineered = false, trace_prompts = false;

  void add_to(CLI::App& app) {
    app.add_option("--profile", profile, "Base profile: pb-adv (default) or uniform-temperature");
    app.add_option("--L0", l0, "Phase 1 iterations");
    app.add_option("--L", l, "Conjecture (Phase 2/3) iterations");
    app.add_option("--K", k_width, "Solver branches per solve");
    app.add_option("--N", n_repeats, "Grading repeats for verified success");
    app.add_option("--k", k_extract, "Hypothesis pairs kept per extraction");
    app.add_option("--tau", tau, "Lemma threshold");
    app.add_option("--tau-e", tau_e, "Post-enhancement lemma threshold");
    app.add_option("--parallel-runs", runs, "Independent pipeline runs");
    app.add_option("--max-workers", workers, "Concurrent model calls per fan-out");
    app.add_option("--token-budget", budget, "Total token budget");
    app.add_option("--pair-token-budget", pair_budget, "Token pool per hypothesis pair (0 = none)");
    app.add_flag("--strict-budget", strict, "Admit a call only if its worst case fits");
    app.add_flag("--engineered-solver", engineered, "Use the engineered solver template");
    app.add_flag("--trace-prompts", trace_prompts, "Record prompts and responses in the trace");
  }

  void apply(PipelineConfig& c) const {
    if (profile) {
      // A profile only swaps temperatures; counts stay as configured.
      c.temperatures = cli::profile(*profile).temperatures;
    }
    if (l0) c.initial_iterations = *l0;
    if (l) c.conjecture_iterations = *l;
    if (k_width) c.solver_width = *k_width;
    if (n_repeats) c.verify_repeats = *n_repeats;
    if (k_extract) c.extraction_budget = *k_extract;
    if (tau) c.threshold = *tau;
    if (tau_e) c.enhancement_threshold = *tau_e;
    if (runs) c.parallel_runs = *runs;
    if (workers) c.max_workers = *workers;
    if (budget) c.token_budget = *budget;
    if (pair_budget) c.pair_token_budget = *pair_budget;
    if (strict) c.strict_budget = true;
    if (engineered) c.use_engineered_solver = true;
    if (trace_prompts) c.trace_prompts = true;
  }
};

gateway::GatewayOptions gateway_options(const PipelineConfig& c) {
  gateway::GatewayOptions o;
  o.token_budget = c.token_budget;
  o.strict_budget = c.strict_budget;
  return o;
}

gateway::PriceTable price_table(const gateway::BackendConfig& b) {
  if (!b.prices.empty()) return b.prices;
  return gateway::PriceTable::reference();
}

json solution_json(const std::optional<CandidateSolution>& s) {
  if (!s) return nullptr;
  json j = *s;
  return j;
}

std::string solution_text(const orchestrator::SessionResult& r) {
  if (!r.solution) {
    return "No solution was produced: " + std::string(to_string(r.termination)) +
           " before any candidate was graded.\n";
  }
  std::ostringstream out;
  out << "<!-- " << r.solution->id << ", score "
      << (r.solution->grade ? std::to_string(r.solution->grade->score()) : std::string("ungraded")) << "/7, "
      << to_string(r.termination) << " -->\n\n"
      << r.solution->proof_text << "\n";
  return out.str();
}

void write_artifacts(const fs::path& out_dir, const orchestrator::SessionResult& r, const gateway::CostLedger& ledger) {
  save(out_dir / "solution.md", solution_text(r));
  save(out_dir / "ledger.json", ledger.to_json().dump(2) + "\n");
  save(out_dir / "ledger.csv", ledger.to_csv());
  save(out_dir / "cost.txt", gateway::render_cost_table(ledger.totals()));
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"run", run.run_id},
                    {"termination", to_string(run.termination)},
                    {"verified", run.verified},
                    {"budget_exhausted", run.budget_exhausted},
                    {"solution", solution_json(run.solution)}});
  }
  json summary{{"termination", to_string(r.termination)},
               {"verified", r.verified},
               {"budget_exhausted", r.budget_exhausted},
               {"winner_run", r.winner_run},
               {"solution", solution_json(r.solution)},
               {"runs", runs},
               {"total_usd", ledger.grand_total().to_string()},
               {"tokens", ledger.tokens_consumed()}};
  save(out_dir / "summary.json", summary.dump(2) + "\n");
}

void report_session(std::ostream& out, const orchestrator::SessionResult& r, const gateway::CostLedger& ledger,
                    const fs::path& out_dir) {
  out << "termination: " << to_string(r.termination) << "\n";
  if (r.solution) {
    out << "solution: " << r.solution->id << " (score "
        << (r.solution->grade ? std::to_string(r.solution->grade->score()) : std::string("-")) << "/7)\n";
  } else {
    out << "solution: none\n";
  }
  if (!r.winner_run.empty()) out << "winner: " << r.winner_run << "\n";
  out << "calls: " << ledger.size() << ", tokens: " << ledger.tokens_consumed()
      << ", cost: $" << ledger.grand_total().to_cents_string() << "\n";
  out << "artifacts: " << out_dir.string() << "\n";
}

// --- subcommands -------------------------------------------------------------

struct SolveArgs {
  std::string problem;
  std::optional<std::string> config, script, templates;
  std::vector<std::string> overrides;
  std::string out = "proofloop-out";
  PipelineFlags flags;
};

CliConfig assemble(const std::optional<std::string>& config_file, const std::optional<std::string>& script,
                   const std::optional<std::string>& templates, const std::vector<std::string>& overrides) {
  CliConfig cfg;
  if (config_file) {
    gateway::IniSections ini;
    try {
      ini = gateway::read_ini(*config_file);
    } catch (const InvalidArgument& e) {
      if (!fs::exists(*config_file)) throw IoError("cannot read " + *config_file);
      throw;
    }
    cfg = config_from_ini(ini, fs::path(*config_file).parent_path());
  }
  if (script) {
    cfg.backend.kind = "scripted";
    cfg.backend.script = *script;
    cfg.backend_configured = true;
  }
  if (templates) cfg.templates_dir = *templates;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--template expects NAME=FILE, got '" + o + "'");
    cfg.template_overrides.emplace_back(prompts::template_from_string(o.substr(0, eq)), o.substr(eq + 1));
  }
  return cfg;
}

ExitCode cmd_solve(const SolveArgs& a, std::ostream& out) {
  CliConfig cfg = assemble(a.config, a.script, a.templates, a.overrides);
  a.flags.apply(cfg.pipeline);
  cfg.pipeline.validate();
  if (!cfg.backend_configured) {
    throw InvalidArgument("no backend: pass --script FILE or a --config with a [backend] section");
  }
  if (cfg.backend.kind == "scripted" && cfg.backend.script && !fs::exists(*cfg.backend.script)) {
    throw IoError("cannot read " + cfg.backend.script->string());
  }
  const Problem problem = read_problem(a.problem);
  const auto registry = load_prompts(cfg);

  gateway::Gateway gw(gateway::make_backend(cfg.backend), price_table(cfg.backend), gateway_options(cfg.pipeline));
  const fs::path out_dir(a.out);
  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    throw IoError("cannot create " + out_dir.string() + ": " + e.what());
  }
  orchestrator::Session session(gw, registry);
  auto r = session.run(problem, cfg.pipeline, cfg.pipeline.parallel_runs, {out_dir});
  write_artifacts(out_dir, r, gw.ledger());
  report_session(out, r, gw.ledger(), out_dir);
  return exit_for(r.termination);
}

struct ResumeArgs {
  std::string trace;
  std::optional<std::string> checkpoint, script, config, templates;
  std::string out;
};

ExitCode cmd_resume(const ResumeArgs& a, std::ostream& out) {
  if (!fs::exists(a.trace)) throw IoError("cannot read " + a.trace);
  auto header = orchestrator::read_trace(a.trace).header;
  CliConfig cfg = assemble(a.config, a.script, a.templates, {});
  const auto registry = load_prompts(cfg);

  std::shared_ptr<gateway::Backend> backend;
  gateway::PriceTable prices;
  if (header.backend_kind == "scripted") {
    auto script = a.script ? gateway::Script::load(*a.script) : gateway::Script::from_json(header.script);
    backend = std::make_shared<gateway::ScriptedBackend>(std::move(script));
    prices.set(backend->id(), header.prices);
  } else {
    if (!cfg.backend_configured || cfg.backend.kind != "http") {
      throw InvalidArgument("this trace used a live backend; pass --config with its [backend] section");
    }
    backend = gateway::make_backend(cfg.backend);
    prices = price_table(cfg.backend);
  }
  gateway::Gateway gw(backend, prices, gateway_options(header.config));
  const fs::path out_dir(a.out);
  fs::create_directories(out_dir);
  orchestrator::Session session(gw, registry);
  auto r = session.resume(a.trace, a.checkpoint, {out_dir});
  write_artifacts(out_dir, r, gw.ledger());
  report_session(out, r, gw.ledger(), out_dir);
  return exit_for(r.termination);
}

struct ReplayArgs {
  std::string trace;
  std::optional<std::string> script, templates;
};

ExitCode cmd_replay(const ReplayArgs& a, std::ostream& out) {
  if (!fs::exists(a.trace)) throw IoError("cannot read " + a.trace);
  CliConfig cfg = assemble(std::nullopt, std::nullopt, a.templates, {});
  std::optional<gateway::Script> script;
  if (a.script) script = gateway::Script::load(*a.script);
  auto report = orchestrator::replay(a.trace, load_prompts(cfg), script);
  out << report.render();
  return report.identical ? ExitCode::ok : ExitCode::best_effort;
}

struct MetricsArgs {
  std::string records;
  std::optional<std::string> out;
  bool json_output = false;
};

ExitCode cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  if (!fs::exists(a.records)) throw IoError("cannot read " + a.records);
  const auto records = metrics::read_records(a.records);
  const auto report = metrics::compute_metrics(records);
  if (a.json_output) {
    out << report.to_json().dump(2) << "\n";
  } else {
    out << metrics::render_report(report);
  }
  if (a.out) {
    const fs::path dir(*a.out);
    save(dir / "metrics.txt", metrics::render_report(report));
    save(dir / "metrics.csv", metrics::report_csv(report));
    save(dir / "metrics.json", report.to_json().dump(2) + "\n");
    save(dir / "confusion.csv", metrics::confusion_csv(report));
  }
  return ExitCode::ok;
}

struct CostArgs {
  std::optional<std::string> file, prices;
  std::vector<std::string> estimate;
  bool csv = false;
};

gateway::CostLedger load_ledger(const fs::path& file) {
  fs::path path = file;
  if (path.extension() == ".jsonl") {
    // Traces carry no prices; the ledger is written next to them.
    path = file.parent_path() / "ledger.json";
    if (!fs::exists(path)) throw IoError("no ledger.json next to " + file.string());
  }
  const auto text = slurp(path);
  if (path.extension() == ".csv") return gateway::CostLedger::from_csv(text);
  try {
    return gateway::CostLedger::from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ExitCode cmd_cost(const CostArgs& a, std::ostream& out) {
  if (!a.estimate.empty()) {
    if (a.estimate.size() != 5) {
      throw InvalidArgument("--estimate takes TOKENS_PER_CALL CALLS_PER_ROUND ROUNDS PARALLEL_RUNS USD_PER_MILLION");
    }
    const auto usd = gateway::estimate_max_budget(
        to_int64("tokens per call", a.estimate[0]), to_int64("calls per round", a.estimate[1]),
        to_int64("rounds", a.estimate[2]), to_int64("parallel runs", a.estimate[3]), Rate::parse(a.estimate[4]));
    out << "$" << usd.to_string() << "\n";
    return ExitCode::ok;
  }
  if (!a.file) throw InvalidArgument("cost needs a ledger or trace file, or --estimate");
  if (!fs::exists(*a.file)) throw IoError("cannot read " + *a.file);
  auto ledger = load_ledger(*a.file);
  if (a.prices) {
    const auto table = gateway::BackendConfig::load(*a.prices).prices;
    if (table.empty()) throw ParseError(*a.prices + " has no [price:<backend>] sections");
    auto entries = ledger.entries();
    for (auto& e : entries) {
      if (!table.contains(e.backend_id)) throw ParseError("no price for backend '" + e.backend_id + "'");
      e.usd = gateway::cost_of(e.usage, table.at(e.backend_id));
    }
    ledger.reset(std::move(entries));
  }
  out << (a.csv ? ledger.to_csv() : gateway::render_cost_table(ledger.totals()));
  return ExitCode::ok;
}

}  // namespace

// --- problem files -----------------------------------------------------------

Problem parse_problem(const std::string& text) {
  static const std::regex marker(R"(^---\s*(statement|materials)\s*---\s*$)");
  static const std::regex header(R"(^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$)");
  Problem p;
  std::string section;
  std::string statement, materials;
  bool has_materials = false;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, marker)) {
      if (m[1] == "statement" && !section.empty()) {
        throw SchemaError("line " + std::to_string(line_no) + ": statement marker must come first");
      }
      if (m[1] == "materials" && section != "statement") {
        throw SchemaError("line " + std::to_string(line_no) + ": materials must follow the statement");
      }
      section = m[1];
      has_materials = has_materials || section == "materials";
      continue;
    }
    if (section.empty()) {
      if (trimmed(line).empty() || trimmed(line).front() == '#') continue;
      if (!std::regex_match(line, m, header)) {
        throw SchemaError("line " + std::to_string(line_no) + ": expected 'key: value' or '--- statement ---'");
      }
      if (m[1] == "id") {
        p.id = trimmed(m[2]);
      } else {
        throw SchemaError("line " + std::to_string(line_no) + ": unknown header key '" + std::string(m[1]) + "'");
      }
      continue;
    }
    (section == "statement" ? statement : materials) += line + "\n";
  }
  p.statement = trimmed(statement);
  if (p.id.empty()) throw SchemaError("problem file has no 'id:' header");
  if (p.statement.empty()) throw SchemaError("problem file has an empty statement");
  if (has_materials && !trimmed(materials).empty()) p.additional_materials = trimmed(materials);
  return p;
}

Problem read_problem(const fs::path& path) {
  try {
    return parse_problem(slurp(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::string format_problem(const Problem& problem) {
  std::string out = "id: " + problem.id + "\n--- statement ---\n" + problem.statement + "\n";
  if (problem.additional_materials) out += "--- materials ---\n" + *problem.additional_materials + "\n";
  return out;
}

// --- config files ------------------------------------------------------------

CliConfig config_from_ini(const gateway::IniSections& ini, const fs::path& base_dir) {
  CliConfig cfg;
  cfg.backend = gateway::BackendConfig::from_ini(ini, base_dir);
  cfg.backend_configured = ini.count("backend") > 0;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  if (auto it = ini.find("pipeline"); it != ini.end()) {
    const auto& kv = it->second;
    if (auto p = kv.find("profile"); p != kv.end()) cfg.pipeline = profile(p->second);
    auto& c = cfg.pipeline;
    for (const auto& [key, value] : kv) {
      const std::string k = "[pipeline] " + key;
      if (key == "profile") continue;
      if (key == "L0") c.initial_iterations = to_int(k, value);
      else if (key == "L") c.conjecture_iterations = to_int(k, value);
      else if (key == "K") c.solver_width = to_int(k, value);
      else if (key == "N") c.verify_repeats = to_int(k, value);
      else if (key == "k") c.extraction_budget = to_int(k, value);
      else if (key == "tau") c.threshold = to_int(k, value);
      else if (key == "tau_e") c.enhancement_threshold = to_int(k, value);
      else if (key == "parallel_runs") c.parallel_runs = to_int(k, value);
      else if (key == "seed_count") c.seed_count = to_int(k, value);
      else if (key == "memory_prompt_cap") c.memory_prompt_cap = to_int(k, value);
      else if (key == "max_workers") c.max_workers = to_int(k, value);
      else if (key == "token_budget") c.token_budget = to_int64(k, value);
      else if (key == "pair_token_budget") c.pair_token_budget = to_int64(k, value);
      else if (key == "strict_budget") c.strict_budget = to_bool(k, value);
      else if (key == "engineered_solver") c.use_engineered_solver = to_bool(k, value);
      else if (key == "trace_prompts") c.trace_prompts = to_bool(k, value);
      else if (key.rfind("grader_phase", 0) == 0 && key.size() == 13 && key[12] >= '1' && key[12] <= '4') {
        c.grader_by_phase[key[12] - '0'] = to_grader(k, value);
      } else if (key.rfind("max_output.", 0) == 0) {
        c.max_output_tokens[role_from_string(key.substr(11))] = to_int64(k, value);
      } else if (key.rfind("temperature.", 0) == 0) {
        try {
          c.temperatures[role_from_string(key.substr(12))] = std::stod(value);
        } catch (const std::logic_error&) {
          throw InvalidArgument(k + " must be a number, got '" + value + "'");
        }
      } else {
        throw InvalidArgument("unknown key " + k);
      }
    }
  }
  if (auto it = ini.find("templates"); it != ini.end()) {
    for (const auto& [key, value] : it->second) {
      if (key == "dir") {
        cfg.templates_dir = resolve(value);
      } else {
        cfg.template_overrides.emplace_back(prompts::template_from_string(key), resolve(value));
      }
    }
  }
  for (const auto& [section, _] : ini) {
    if (section != "pipeline" && section != "templates" && section != "backend" && section.rfind("price:", 0) != 0) {
      throw InvalidArgument("unknown config section [" + section + "]");
    }
  }
  return cfg;
}

prompts::PromptRegistry load_prompts(const CliConfig& config) {
  auto registry = config.templates_dir ? prompts::PromptRegistry::load(*config.templates_dir)
                                       : prompts::PromptRegistry::load_default();
  for (const auto& [id, file] : config.template_overrides) {
    if (!fs::exists(file)) throw IoError("cannot read template " + file.string());
    registry = registry.with_override(id, file);
  }
  return registry;
}

// --- entry point -------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterative proof search with conjecture extraction, plus grader metrics and cost tools"};
  app.name(args.empty() ? "proofloop" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", "proofloop 1.0");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve a problem file");
  s->add_option("problem", solve.problem, "Problem file")->required();
  s->add_option("--config", solve.config, "INI file with [backend], [pipeline], [templates] and [price:*]");
  s->add_option("--script", solve.script, "Scripted backend file (forces the scripted backend)");
  s->add_option("--templates", solve.templates, "Directory of prompt templates");
  s->add_option("--template", solve.overrides, "Override one template: NAME=FILE");
  s->add_option("--out", solve.out, "Output directory")->capture_default_str();
  solve.flags.add_to(*s);

  ResumeArgs resume;
  auto* r = app.add_subcommand("resume", "Continue a run from a checkpoint");
  r->add_option("trace", resume.trace, "trace.jsonl of the interrupted run")->required();
  r->add_option("--checkpoint", resume.checkpoint, "Checkpoint id (default: the latest of each run)");
  r->add_option("--out", resume.out, "New output directory")->required();
  r->add_option("--script", resume.script, "Scripted backend file (default: the one in the trace)");
  r->add_option("--config", resume.config, "INI file for a live backend");
  r->add_option("--templates", resume.templates, "Directory of prompt templates");

  ReplayArgs replay;
  auto* p = app.add_subcommand("replay", "Re-run a scripted trace and report the first divergence");
  p->add_option("trace", replay.trace, "trace.jsonl")->required();
  p->add_option("--script", replay.script, "Script to use instead of the embedded one");
  p->add_option("--templates", replay.templates, "Directory of prompt templates");

  MetricsArgs metrics;
  auto* m = app.add_subcommand("metrics", "Score a grader against human grades");
  m->add_option("records", metrics.records, "CSV or JSONL with human and predicted columns")->required();
  m->add_option("--out", metrics.out, "Write metrics.{txt,csv,json} and confusion.csv here");
  m->add_flag("--json", metrics.json_output, "Print the JSON report");

  CostArgs cost;
  auto* c = app.add_subcommand("cost", "Cost table for a ledger, or a worst-case estimate");
  c->add_option("file", cost.file, "ledger.json, ledger.csv or a trace.jsonl next to its ledger.json");
  c->add_option("--prices", cost.prices, "Reprice with the [price:*] sections of this INI file");
  c->add_option("--estimate", cost.estimate,
                "TOKENS_PER_CALL CALLS_PER_ROUND ROUNDS PARALLEL_RUNS USD_PER_MILLION")
      ->expected(5);
  c->add_flag("--csv", cost.csv, "Print the ledger as CSV instead of the table");

  std::vector<std::string> argv_store(args.begin(), args.end());
  if (argv_store.empty()) argv_store.push_back("proofloop");
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    ExitCode code = ExitCode::ok;
    if (*s) code = cmd_solve(solve, out);
    else if (*r) code = cmd_resume(resume, out);
    else if (*p) code = cmd_replay(replay, out);
    else if (*m) code = cmd_metrics(metrics, out);
    else if (*c) code = cmd_cost(cost, out);
    return static_cast<int>(code);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::io);
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::usage);
  } catch (const ResumeError& e) {
    err << "cannot resume: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  } catch (const ReplayRefused& e) {
    err << "replay refused: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  } catch (const VersionError& e) {
    err << "version error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::internal);
  }
}

}  // namespace proofloop::cli
