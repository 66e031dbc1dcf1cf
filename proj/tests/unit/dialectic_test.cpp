#include <map>

#include <gtest/gtest.h>

#include "proofloop/core/errors.hpp"
#include "proofloop/dialectic/engine.hpp"
#include "proofloop/dialectic/parsing.hpp"
#include "support/scenarios.hpp"

using namespace proofloop;
using namespace proofloop::dialectic;
using namespace proofloop::testkit;
using gateway::Script;

namespace {

PipelineConfig cfg() {
  auto c = PipelineConfig::pb_adv_defaults();
  c.max_workers = 4;
  return c;
}

std::map<std::string, int> kinds_on_lane(const std::vector<TraceEvent>& events, const std::string& lane) {
  std::map<std::string, int> out;
  for (const auto& e : events) {
    if (e.lane == lane) ++out[e.kind];
  }
  return out;
}

std::map<Role, int> roles_on_lane(const gateway::CostLedger& ledger, const std::string& lane) {
  std::map<Role, int> out;
  for (const auto& e : ledger.entries()) {
    if (e.lane == lane) ++out[e.role];
  }
  return out;
}

CallSite site(EventBuffer* events, const std::string& lane = "t") { return CallSite{"r1", lane, 1, nullptr, events}; }

}  // namespace

// --- parsing -------------------------------------------------------------

TEST(ParseGrade, PerfectScore) {
  auto g = parse_grade("blah\n**Final Grade:** 7/7\n");
  EXPECT_EQ(g.score(), 7);
  EXPECT_TRUE(g.issues().empty());
  EXPECT_TRUE(g.notes().empty());
}

TEST(ParseGrade, FallacyCapsScoreAndRecordsNote) {
  auto g = parse_grade(grader_says(6, {"**Fallacy:** uses an unproven lemma."}));
  EXPECT_EQ(g.score(), 3);
  ASSERT_EQ(g.issues().size(), 1u);
  EXPECT_EQ(g.issues()[0].severity, Severity::fallacy);
  ASSERT_EQ(g.notes().size(), 1u);
  EXPECT_NE(g.notes()[0].find("capped"), std::string::npos);
}

TEST(ParseGrade, FiveCoercedDownToFour) {
  auto g = parse_grade("**Areas for Improvement:**\nNone.\n**Final Grade:** 5/7");
  EXPECT_EQ(g.score(), 4);
  ASSERT_EQ(g.notes().size(), 1u);
  EXPECT_NE(g.notes()[0].find("5 coerced to 4"), std::string::npos);
}

TEST(ParseGrade, SevenWithSlipBecomesSix) {
  auto g = parse_grade(grader_says(7, {"**Slip:** sign error in line 3."}));
  EXPECT_EQ(g.score(), 6);
  EXPECT_EQ(g.slip_count(), 1u);
  EXPECT_FALSE(g.perfect());
}

TEST(ParseGrade, LastAnchorWins) {
  auto g = parse_grade("Draft verdict... Final Grade: 2/7 (revised below)\n\n**Final Grade:** 6/7\n"
                       "The final grade reflects the single slip.");
  EXPECT_EQ(g.score(), 6);
}

TEST(ParseGrade, MissingOrBadScoreFails) {
  EXPECT_THROW(parse_grade("I like this proof."), GradeParseFailure);
  EXPECT_THROW(parse_grade("Final Grade: pending"), GradeParseFailure);
  EXPECT_THROW(parse_grade("Final Grade: 9/7"), GradeParseFailure);
}

TEST(ParseGrade, UntaggedIssuesCountAsFallacies) {
  auto g = parse_grade(grader_says(6, {"The induction base is missing."}));
  EXPECT_EQ(g.score(), 3);
  EXPECT_EQ(g.fallacy_count(), 1u);
}

TEST(ParseGrade, ScaffoldingCollected) {
  auto g = parse_grade(grader_says(6, {"**Slip:** minor"}, {"What is a bipartite graph?", "Why odd cycles?"}));
  EXPECT_EQ(g.scaffolding(), (std::vector<std::string>{"What is a bipartite graph?", "Why odd cycles?"}));
}

TEST(ParseCensor, NoIssuesExact) {
  EXPECT_TRUE(parse_censor("NO_ISSUES").empty());
  EXPECT_TRUE(parse_censor("  NO_ISSUES \n").empty());
}

TEST(ParseCensor, TwoBulletsTwoIssues) {
  auto issues = parse_censor("Found:\n- \"it is clear that\" in step 2\n- \"well-known\" in step 4\n");
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_NE(issues[0].find("step 2"), std::string::npos);
}

TEST(ParseCensor, WrongCaseIsOneOpaqueIssue) {
  auto issues = parse_censor("no_issues ");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0], "no_issues");
}

TEST(ExtractProof, TakesTextAfterLastBlueprint) {
  EXPECT_EQ(extract_proof_text(solver_says("THE PROOF")), "THE PROOF");
  EXPECT_EQ(extract_proof_text("just a proof"), "just a proof");
  EXPECT_EQ(extract_proof_text("Final Blueprint: inline proof"), "inline proof");
}

// --- engine --------------------------------------------------------------

TEST(LazyPhraseCheck, ScriptedResponses) {
  Script s;
  s.on(Role::processor, {"alpha"}, {"NO_ISSUES"});
  s.on(Role::processor, {"beta"}, {"- one\n- two"});
  s.on(Role::processor, {"gamma"}, {"no_issues "});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  EventBuffer ev;
  EXPECT_TRUE(eng.lazy_phrase_check("alpha", site(&ev)).empty());
  EXPECT_EQ(eng.lazy_phrase_check("beta", site(&ev)).size(), 2u);
  EXPECT_EQ(eng.lazy_phrase_check("gamma", site(&ev)).size(), 1u);
}

TEST(Grade, ScriptedGraderOutputs) {
  Script s;
  s.on(Role::grader, {"P7"}, {"Final Grade: 7/7"});
  s.on(Role::grader, {"P6F"}, {grader_says(6, {"**Fallacy:** gap"})});
  s.on(Role::grader, {"P5"}, {"Final Grade: 5/7"});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  auto p = demo_problem();
  EXPECT_EQ(eng.grade(p, "P7", "", site(nullptr)).score(), 7);
  auto capped = eng.grade(p, "P6F", "", site(nullptr));
  EXPECT_EQ(capped.score(), 3);
  EXPECT_FALSE(capped.notes().empty());
  auto five = eng.grade(p, "P5", "", site(nullptr));
  EXPECT_EQ(five.score(), 4);
  EXPECT_FALSE(five.notes().empty());
}

TEST(Grade, CouncilVariantSelectedPerPhase) {
  Script s;
  s.on(Role::grader, {"Council of Graders with Scaffolding"}, {"Final Grade: 6/7"});
  s.on(Role::grader, {}, {"Final Grade: 2/7"});
  Rig rig(s);
  auto c = cfg();
  c.grader_by_phase[4] = GraderVariant::council;
  DialecticEngine eng(rig.gateway, shipped_prompts(), c);
  auto p = demo_problem();
  CallSite s4 = site(nullptr);
  s4.phase = 4;
  EXPECT_EQ(eng.grade(p, "x", "", s4).score(), 6);
  EXPECT_EQ(eng.grade(p, "x", "", site(nullptr)).score(), 2);
}

TEST(VerifiedSuccess, ThreeCleanSevens) {
  Script s;
  s.on(Role::grader, {}, {"Final Grade: 7/7"});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  CandidateSolution c;
  c.proof_text = "pf";
  auto out = eng.verified_success(demo_problem(), c, 3, site(nullptr));
  EXPECT_TRUE(out.success);
  EXPECT_EQ(out.grades.size(), 3u);
  EXPECT_EQ(rig.gateway.ledger().size(), 3u);
  for (const auto& g : out.grades) EXPECT_TRUE(g.perfect());
}

TEST(VerifiedSuccess, ShortCircuitsOnFirstImperfect) {
  Script s;
  s.on(Role::grader, {}, {"Final Grade: 7/7", grader_says(6, {"**Slip:** s"}), "Final Grade: 7/7"});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  CandidateSolution c;
  c.proof_text = "pf";
  auto out = eng.verified_success(demo_problem(), c, 3, site(nullptr));
  EXPECT_FALSE(out.success);
  EXPECT_EQ(rig.gateway.ledger().size(), 2u);
}

TEST(VerifiedSuccess, SevenWithSlipIsNotSuccess) {
  Script s;
  s.on(Role::grader, {}, {grader_says(7, {"**Slip:** tiny"})});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  CandidateSolution c;
  c.proof_text = "pf";
  auto out = eng.verified_success(demo_problem(), c, 3, site(nullptr));
  EXPECT_FALSE(out.success);
  EXPECT_EQ(out.grades.size(), 1u);
}

// Hand count for a branch whose first draft is lazy: draft, censor (issues),
// redraft, grade, refine, regrade.
TEST(DialecticSolve, LazyDraftBranchCallShape) {
  Script s;
  s.on(Role::processor, {"it is clear that"}, {"- \"it is clear that\" hides the key step"});
  s.on(Role::processor, {}, {"NO_ISSUES"});
  s.on(Role::solver, {}, {solver_says("Hence it is clear that G is red."), solver_says("Explicit: G is red since ..."),
                          solver_says("Refined: G is red since ...")});
  s.on(Role::grader, {}, {grader_says(6, {"**Slip:** sloppy"}), grader_says(7)});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  EventBuffer ev;
  auto res = eng.solve(demo_problem(), SolveContext{}, 1, site(&ev));
  ASSERT_EQ(res.solutions.size(), 1u);
  auto kinds = kinds_on_lane(ev.events(), "t/b1");
  EXPECT_EQ(kinds["draft"], 2);
  EXPECT_EQ(kinds["censor"], 1);
  EXPECT_EQ(kinds["grade"] + kinds["regrade"], 2);
  EXPECT_EQ(kinds["refine"], 1);
  auto roles = roles_on_lane(rig.gateway.ledger(), "t/b1");
  EXPECT_EQ(roles[Role::solver], 3);  // draft, redraft, refine
  EXPECT_EQ(roles[Role::grader], 2);
  EXPECT_EQ(roles[Role::processor], 1);
  EXPECT_EQ(res.solutions[0].proof_text, "Refined: G is red since ...");
  EXPECT_EQ(res.solutions[0].score(), 7);
  EXPECT_EQ(res.solutions[0].cost, rig.gateway.ledger().grand_total());
}

TEST(DialecticSolve, CleanDraftHappyPath) {
  Rig rig(scenario::instant_success());
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  EventBuffer ev;
  auto res = eng.solve(demo_problem(), SolveContext{}, 1, site(&ev));
  ASSERT_EQ(res.solutions.size(), 1u);
  EXPECT_EQ(res.solutions[0].score(), 7);
  EXPECT_EQ(res.solutions[0].origin, Origin::fresh);
  EXPECT_EQ(kinds_on_lane(ev.events(), "t/b1")["draft"], 1);
}

TEST(DialecticSolve, FourBranchesInIndexOrder) {
  Script s;
  s.on(Role::processor, {}, {"NO_ISSUES"});
  s.rules.push_back(gateway::ScriptRule{"", Role::solver, {}, {}, "b1$", gateway::CursorScope::lane, {{solver_says("one"), {}, {}, 0, false}}});
  s.rules.push_back(gateway::ScriptRule{"", Role::solver, {}, {}, "b2$", gateway::CursorScope::lane, {{solver_says("two"), {}, {}, 0, false}}});
  s.rules.push_back(gateway::ScriptRule{"", Role::solver, {}, {}, "b3$", gateway::CursorScope::lane, {{solver_says("three"), {}, {}, 0, false}}});
  s.rules.push_back(gateway::ScriptRule{"", Role::solver, {}, {}, "b4$", gateway::CursorScope::lane, {{solver_says("four"), {}, {}, 0, false}}});
  s.on(Role::grader, {}, {"Final Grade: 6/7"});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  EventBuffer ev;
  auto res = eng.solve(demo_problem(), SolveContext{}, 4, site(&ev));
  ASSERT_EQ(res.solutions.size(), 4u);
  std::vector<std::string> texts;
  for (const auto& sol : res.solutions) texts.push_back(sol.proof_text);
  EXPECT_EQ(texts, (std::vector<std::string>{"one", "two", "three", "four"}));
  std::vector<std::string> lanes;
  for (const auto& e : ev.events()) {
    if (lanes.empty() || lanes.back() != e.lane) lanes.push_back(e.lane);
  }
  EXPECT_EQ(lanes, (std::vector<std::string>{"t/b1", "t/b2", "t/b3", "t/b4"}));
}

TEST(DialecticSolve, DeterministicAcrossRuns) {
  auto once = [] {
    Rig rig(scenario::cognitive_well());
    DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
    EventBuffer ev;
    auto res = eng.solve(demo_problem(), SolveContext{}, 4, site(&ev));
    std::vector<std::pair<std::string, int>> out;
    for (const auto& sol : res.solutions) out.emplace_back(sol.proof_text, sol.score());
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : ev.events()) events.push_back({e.kind, e.lane, e.data});
    return std::make_pair(out, events.dump());
  };
  EXPECT_EQ(once(), once());
}

TEST(DialecticSolve, BudgetExhaustionDropsIncompleteBranches) {
  Rig rig(scenario::cognitive_well(), quick_options(15'000));
  auto c = cfg();
  c.max_workers = 1;
  for (Role r : kAllRoles) c.max_output_tokens[r] = 2'000;
  DialecticEngine eng(rig.gateway, shipped_prompts(), c);
  EventBuffer ev;
  auto res = eng.solve(demo_problem(), SolveContext{}, 4, site(&ev));
  EXPECT_TRUE(res.budget_exhausted);
  EXPECT_LT(res.solutions.size(), 4u);
  EXPECT_EQ(res.solutions.size() + res.dropped.size(), 4u);
  for (const auto& sol : res.solutions) EXPECT_TRUE(sol.grade.has_value());
}

TEST(DialecticSolve, ContextReachesSolverPrompt) {
  Script s;
  s.on(Role::processor, {}, {"NO_ISSUES"});
  s.on(Role::solver, {"Proven lemma", "LEMMA-X"}, {solver_says("used the lemma")});
  s.on(Role::solver, {}, {solver_says("no lemma")});
  s.on(Role::grader, {}, {"Final Grade: 6/7"});
  Rig rig(s);
  DialecticEngine eng(rig.gateway, shipped_prompts(), cfg());
  SolveContext ctx;
  ctx.lemmas.push_back(Lemma{"LEMMA-X holds", Polarity::positive, "pf", 7, 2, "h1", 7});
  auto res = eng.solve(demo_problem(), ctx, 1, site(nullptr));
  ASSERT_EQ(res.solutions.size(), 1u);
  EXPECT_EQ(res.solutions[0].proof_text, "used the lemma");
  EXPECT_EQ(res.solutions[0].context_digest, ctx.digest());
}

TEST(SolveContext, StableSectionOrder) {
  SolveContext ctx;
  ctx.prior_solutions.push_back({"s1", "old proof", 6});
  ctx.feedback.push_back("fix step 2");
  ctx.lemmas.push_back(Lemma{"L", Polarity::positive, "pf", 7, 0, "h", 7});
  auto text = ctx.serialize();
  auto l = text.find("Proven lemmas");
  auto f = text.find("Feedback to address");
  auto p = text.find("Prior solution attempts");
  EXPECT_LT(l, f);
  EXPECT_LT(f, p);
  EXPECT_EQ(SolveContext{}.serialize(), "");
}
