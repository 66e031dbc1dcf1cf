#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "proofloop/cli/cli.hpp"
#include "proofloop/core/errors.hpp"
#include "proofloop/orchestrator/trace.hpp"
#include "support/scenarios.hpp"
#include "support/test_paths.hpp"

using namespace proofloop;
using namespace proofloop::testkit;
using cli::ExitCode;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "proofloop");
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

int code(ExitCode c) { return static_cast<int>(c); }

std::string demo(const std::string& name) { return data_file("demo/" + name).string(); }

int count_kind(const std::filesystem::path& trace, const std::string& kind) {
  int n = 0;
  for (const auto& e : orchestrator::read_trace(trace).events) n += e.kind == kind;
  return n;
}

}  // namespace

TEST(CliProblemFile, ParsesHeaderStatementAndMaterials) {
  auto p = cli::parse_problem("# comment\nid: p-1\n\n--- statement ---\nShow x.\n\nSecond line.\n--- materials ---\nTry y.\n");
  EXPECT_EQ(p.id, "p-1");
  EXPECT_EQ(p.statement, "Show x.\n\nSecond line.");
  ASSERT_TRUE(p.additional_materials);
  EXPECT_EQ(*p.additional_materials, "Try y.");
  EXPECT_EQ(cli::parse_problem(cli::format_problem(p)).statement, p.statement);
  EXPECT_FALSE(cli::parse_problem("id: a\n--- statement ---\nS\n").additional_materials);
}

TEST(CliProblemFile, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      cli::parse_problem(text);
    } catch (const SchemaError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("id: a\ncolour: red\n--- statement ---\nS\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("id: a\nnonsense\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("--- statement ---\nS\n").find("id"), std::string::npos);
  EXPECT_NE(message("id: a\n--- statement ---\n\n").find("empty statement"), std::string::npos);
  EXPECT_NE(message("id: a\n--- materials ---\nM\n").find("line 2"), std::string::npos);
}

TEST(CliConfig, PipelineKeysAndOverrides) {
  auto ini = gateway::parse_ini(
      "[pipeline]\nL0 = 2\nK = 3\ntau_e = 5\ngrader_phase4 = council\nmax_output.solver = 9000\n"
      "[templates]\nsolver = my_solver.md\n");
  auto cfg = cli::config_from_ini(ini, "/base");
  EXPECT_EQ(cfg.pipeline.initial_iterations, 2);
  EXPECT_EQ(cfg.pipeline.solver_width, 3);
  EXPECT_EQ(cfg.pipeline.enhancement_threshold, 5);
  EXPECT_EQ(cfg.pipeline.grader_for_phase(4), GraderVariant::council);
  EXPECT_EQ(cfg.pipeline.grader_for_phase(1), GraderVariant::simplified);
  EXPECT_EQ(cfg.pipeline.max_output(Role::solver), 9000);
  ASSERT_EQ(cfg.template_overrides.size(), 1u);
  EXPECT_EQ(cfg.template_overrides[0].second, std::filesystem::path("/base/my_solver.md"));
  EXPECT_FALSE(cfg.backend_configured);
}

TEST(CliConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(cli::config_from_ini(gateway::parse_ini("[pipeline]\nwidth = 3\n")), InvalidArgument);
  EXPECT_THROW(cli::config_from_ini(gateway::parse_ini("[pipeline]\nK = three\n")), InvalidArgument);
  EXPECT_THROW(cli::config_from_ini(gateway::parse_ini("[pipelines]\nK = 3\n")), InvalidArgument);
  EXPECT_THROW(cli::config_from_ini(gateway::parse_ini("[pipeline]\nstrict_budget = maybe\n")), InvalidArgument);
}

TEST(CliSolve, DemoVerifiesAndWritesArtifacts) {
  TempDir out("pl-cli");
  auto o = cli_run({"solve", demo("problem.txt"), "--config", demo("config.ini"), "--out", out.path().string()});
  ASSERT_EQ(o.code, code(ExitCode::ok)) << o.err;
  for (const auto* f : {"solution.md", "trace.jsonl", "ledger.json", "ledger.csv", "cost.txt", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  EXPECT_NE(read_file(out / "solution.md").find("CORRECT-PROOF"), std::string::npos);
  auto summary = json::parse(read_file(out / "summary.json"));
  EXPECT_EQ(summary.at("termination"), "verified");
  EXPECT_EQ(count_kind(out / "trace.jsonl", "judge"), 1);
  // No temp files left behind by the atomic writes.
  for (const auto& e : std::filesystem::directory_iterator(out.path())) {
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos) << e.path();
  }
}

TEST(CliSolve, SingleRunHasNoJudgeCall) {
  TempDir out("pl-cli");
  auto o = cli_run({"solve", demo("problem.txt"), "--config", demo("config.ini"), "--parallel-runs", "1", "--out",
                    out.path().string()});
  ASSERT_EQ(o.code, code(ExitCode::ok)) << o.err;
  EXPECT_EQ(count_kind(out / "trace.jsonl", "judge"), 0);
  auto ledger = json::parse(read_file(out / "ledger.json"));
  for (const auto& e : ledger.at("entries")) EXPECT_NE(e.at("role"), "judge");
}

TEST(CliSolve, TinyBudgetExitsWithBudgetCode) {
  TempDir out("pl-cli");
  auto o = cli_run({"solve", demo("problem.txt"), "--script", demo("cognitive_well.json"), "--token-budget", "10",
                    "--out", out.path().string()});
  EXPECT_EQ(o.code, code(ExitCode::budget_exhausted)) << o.err;
  EXPECT_TRUE(std::filesystem::exists(out / "solution.md"));
  EXPECT_EQ(json::parse(read_file(out / "summary.json")).at("termination"), "budget_exhausted");
}

TEST(CliSolve, SmallBudgetKeepsBestPartial) {
  TempDir out("pl-cli");
  auto o = cli_run({"solve", demo("problem.txt"), "--script", demo("never_verifies.json"), "--token-budget", "6000",
                    "--out", out.path().string()});
  EXPECT_EQ(o.code, code(ExitCode::budget_exhausted)) << o.err;
  EXPECT_NE(read_file(out / "solution.md").find("CIRCULAR-PROOF"), std::string::npos);
}

TEST(CliSolve, UnverifiedIsBestEffort) {
  TempDir out("pl-cli");
  auto o = cli_run({"solve", demo("problem.txt"), "--script", demo("never_verifies.json"), "--L", "1", "--K", "2",
                    "--parallel-runs", "1", "--out", out.path().string()});
  EXPECT_EQ(o.code, code(ExitCode::best_effort)) << o.err;
  EXPECT_EQ(json::parse(read_file(out / "summary.json")).at("termination"), "post_enhanced");
}

TEST(CliSolve, UsageAndInputErrors) {
  TempDir out("pl-cli");
  const auto dir = out.path().string();
  EXPECT_EQ(cli_run({"solve", demo("problem.txt"), "--script", demo("cognitive_well.json"), "--K", "0", "--out", dir}).code,
            code(ExitCode::usage));
  EXPECT_EQ(cli_run({"solve", demo("problem.txt"), "--bogus"}).code, code(ExitCode::usage));
  EXPECT_EQ(cli_run({}).code, code(ExitCode::usage));
  EXPECT_EQ(cli_run({"solve", demo("problem.txt"), "--out", dir}).code, code(ExitCode::usage));
  EXPECT_EQ(cli_run({"solve", (out / "missing.txt").string(), "--script", demo("cognitive_well.json"), "--out", dir}).code,
            code(ExitCode::io));
  write_file(out / "bad.txt", "no header here\n");
  auto bad = cli_run({"solve", (out / "bad.txt").string(), "--script", demo("cognitive_well.json"), "--out", dir});
  EXPECT_EQ(bad.code, code(ExitCode::data));
  EXPECT_NE(bad.err.find("line 1"), std::string::npos) << bad.err;
  EXPECT_EQ(cli_run({"--help"}).code, 0);
}

TEST(CliMetrics, FixtureReportMatchesOracle) {
  auto expected = json::parse(read_file(fixture("metrics_expected.json")));
  TempDir out("pl-cli");
  auto o = cli_run({"metrics", fixture("grader_records.csv").string(), "--json", "--out", out.path().string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto j = json::parse(o.out);
  for (const auto* k : {"acc", "merged_acc", "mae", "fpr", "fnr"}) EXPECT_EQ(j.at(k).at("fraction"), expected.at(k)) << k;
  EXPECT_EQ(j.at("confusion"), expected.at("confusion"));
  for (const auto* f : {"metrics.txt", "metrics.csv", "metrics.json", "confusion.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
}

TEST(CliMetrics, EmptyAndHeaderOnlyFilesFail) {
  TempDir tmp("pl-cli");
  write_file(tmp / "empty.csv", "");
  write_file(tmp / "header.csv", "human,predicted,problem_id\n");
  auto e = cli_run({"metrics", (tmp / "empty.csv").string()});
  EXPECT_EQ(e.code, code(ExitCode::data));
  auto h = cli_run({"metrics", (tmp / "header.csv").string()});
  EXPECT_EQ(h.code, code(ExitCode::data));
  EXPECT_NE(h.err.find("0 records"), std::string::npos) << h.err;
  write_file(tmp / "bad.jsonl", "{\"human\": 7, \"predicted\": 7}\n{\"human\": 12, \"predicted\": 7}\n");
  auto b = cli_run({"metrics", (tmp / "bad.jsonl").string()});
  EXPECT_EQ(b.code, code(ExitCode::data));
  EXPECT_NE(b.err.find("line 2"), std::string::npos) << b.err;
}

TEST(CliCost, EstimateMatchesWorstCase) {
  auto o = cli_run({"cost", "--estimate", "32000", "2", "30", "100", "10"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "$1920.00\n");
  EXPECT_EQ(cli_run({"cost", "--estimate", "32000", "0", "30", "100", "10"}).code, code(ExitCode::usage));
}

TEST(CliCost, TwoRunLedgerSubtotals) {
  auto o = cli_run({"cost", fixture("two_run_ledger.csv").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  // Hand sums: run1 0.1234567 + 0.0000001, run2 1.5, session 0.25.
  EXPECT_NE(o.out.find("Exact total: $1.8734568"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("$0.12"), std::string::npos);
  EXPECT_NE(o.out.find("$1.50"), std::string::npos);
  EXPECT_NE(o.out.find("$0.25"), std::string::npos);
}

TEST(CliCost, RepricingNeedsEveryBackend) {
  TempDir tmp("pl-cli");
  write_file(tmp / "prices.ini", "[price:other]\ninput_usd_per_million = 1\noutput_usd_per_million = 1\n");
  auto o = cli_run({"cost", fixture("two_run_ledger.csv").string(), "--prices", (tmp / "prices.ini").string()});
  EXPECT_EQ(o.code, code(ExitCode::data));
  EXPECT_NE(o.err.find("scripted"), std::string::npos);
  write_file(tmp / "prices.ini", "[price:scripted]\ninput_usd_per_million = 1\noutput_usd_per_million = 10\n");
  auto r = cli_run({"cost", fixture("two_run_ledger.csv").string(), "--prices", (tmp / "prices.ini").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  // 4510 input at $1/M plus 371 output+thinking at $10/M.
  EXPECT_NE(r.out.find("Exact total: $0.0082"), std::string::npos) << r.out;
}

TEST(CliCost, ReadsTheLedgerNextToATrace) {
  TempDir out("pl-cli");
  ASSERT_EQ(cli_run({"solve", demo("problem.txt"), "--config", demo("config.ini"), "--out", out.path().string()}).code, 0);
  auto o = cli_run({"cost", (out / "trace.jsonl").string()});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("run2"), std::string::npos);
}

TEST(CliReplay, IdenticalThenDivergentThenRefused) {
  TempDir out("pl-cli");
  ASSERT_EQ(cli_run({"solve", demo("problem.txt"), "--config", demo("config.ini"), "--out", out.path().string()}).code, 0);
  const auto trace = (out / "trace.jsonl").string();
  auto same = cli_run({"replay", trace});
  EXPECT_EQ(same.code, 0) << same.err;
  EXPECT_NE(same.out.find("identical"), std::string::npos);

  auto script = json::parse(read_file(data_file("demo/cognitive_well.json")));
  for (auto& rule : script.at("rules")) {
    if (rule.value("role", "") == "grader" && rule.contains("contains") && rule["contains"][0] == "WRONG-PROOF") {
      rule["responses"][0]["text"] = grader_says(5, {"**Slip:** off by one."});
    }
  }
  write_file(out / "altered.json", script.dump());
  auto diff = cli_run({"replay", trace, "--script", (out / "altered.json").string()});
  EXPECT_EQ(diff.code, code(ExitCode::best_effort));
  EXPECT_NE(diff.out.find("run1"), std::string::npos) << diff.out;

  auto text = read_file(trace);
  auto nl = text.find('\n');
  auto header = json::parse(text.substr(0, nl));
  header["backend"]["kind"] = "http";
  write_file(out / "live.jsonl", header.dump() + text.substr(nl));
  auto refused = cli_run({"replay", (out / "live.jsonl").string()});
  EXPECT_EQ(refused.code, code(ExitCode::data));
  EXPECT_NE(refused.err.find("refused"), std::string::npos);

  header["backend"]["kind"] = "scripted";
  header["version"] = orchestrator::kTraceVersion + 1;
  write_file(out / "newer.jsonl", header.dump() + text.substr(nl));
  auto newer = cli_run({"replay", (out / "newer.jsonl").string()});
  EXPECT_EQ(newer.code, code(ExitCode::data));
  EXPECT_NE(newer.err.find("version"), std::string::npos);
}

TEST(CliResume, FromACheckpointReachesTheSameSolution) {
  TempDir out("pl-cli");
  TempDir again("pl-cli");
  ASSERT_EQ(cli_run({"solve", demo("problem.txt"), "--config", demo("config.ini"), "--out", out.path().string()}).code, 0);
  auto o = cli_run({"resume", (out / "trace.jsonl").string(), "--checkpoint", "run1-cp002", "--out",
                    again.path().string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_file(again / "solution.md"), read_file(out / "solution.md"));
  EXPECT_EQ(json::parse(read_file(again / "ledger.json")).at("totals"),
            json::parse(read_file(out / "ledger.json")).at("totals"));
  auto bad = cli_run({"resume", (out / "trace.jsonl").string(), "--checkpoint", "nope", "--out",
                      (again / "x").string()});
  EXPECT_EQ(bad.code, code(ExitCode::data));
}
