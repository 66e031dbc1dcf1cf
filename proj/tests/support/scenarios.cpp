#include "support/scenarios.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace proofloop::testkit {

using gateway::Script;

std::string grader_says(int score, const std::vector<std::string>& issues,
                        const std::vector<std::string>& scaffolding) {
  std::ostringstream out;
  out << "**Part 1: The Grading Log**\nRound 0: the council reads the proof.\n\n";
  out << "**Part 2: The Final Verdict**\n\n";
  out << "**Coroner's Report:** " << (score >= 6 ? "Clean Bill of Health." : "Cause of Death: a gap.") << "\n\n";
  out << "**Strengths:**\n1. Clear structure.\n\n";
  out << "**Areas for Improvement:**\n";
  if (issues.empty()) out << "None.\n";
  for (std::size_t i = 0; i < issues.size(); ++i) out << i + 1 << ". " << issues[i] << "\n";
  out << "\n**Scaffolding Questions:**\n";
  for (std::size_t i = 0; i < scaffolding.size(); ++i) out << i + 1 << ". " << scaffolding[i] << "\n";
  out << "\n**Final Grade:**\n**" << score << " / 7**\n";
  return out.str();
}

std::string solver_says(const std::string& proof) {
  return "**Part 1: The Process Log**\n**Round 1**\nThe council debates.\n\n"
         "**Part 2: The Final Synthesis**\n\n**The Architect's Log (Hemingway Style):**\nIt worked.\n\n"
         "**The Final Blueprint (Reviewer-Ready):**\n" +
         proof + "\n";
}

std::string parser_says(const std::vector<std::string>& conjectures, const std::vector<std::string>& negations,
                        const std::string& proof) {
  nlohmann::json j{{"conjectures", conjectures}, {"negations", negations}, {"proof", proof}};
  return "```json\n" + j.dump(2) + "\n```\n";
}

const prompts::PromptRegistry& shipped_prompts() {
  static const prompts::PromptRegistry r = prompts::PromptRegistry::load_default();
  return r;
}

gateway::GatewayOptions quick_options(std::int64_t budget) {
  gateway::GatewayOptions o;
  o.token_budget = budget;
  o.backoff_base = std::chrono::milliseconds(0);
  return o;
}

Rig::Rig(Script script, gateway::GatewayOptions options)
    : backend(std::make_shared<gateway::ScriptedBackend>(std::move(script))),
      gateway(backend, gateway::PriceTable::reference(), options) {}

Problem demo_problem(const std::string& id) {
  return Problem{id, "Prove that every widget in the finite gadget G is either red or blue.", std::nullopt};
}

namespace scenario {

Script instant_success() {
  Script s;
  s.on(Role::processor, {}, {"NO_ISSUES"});
  s.on(Role::grader, {}, {grader_says(7)});
  s.on(Role::solver, {}, {solver_says("DIRECT-PROOF: colour every widget by parity; done.")});
  s.on(Role::extractor, {}, {"Conjecture 1: DIRECT-C. Negation of Conjecture 1: not DIRECT-C."});
  s.on(Role::parser, {}, {parser_says({"DIRECT-C holds"}, {"DIRECT-C fails"})});
  s.on(Role::judge, {}, {"Both fine.\n<decision>A</decision>"});
  return s;
}

Script never_verifies() {
  Script s;
  s.on(Role::processor, {}, {"NO_ISSUES"});
  s.on(Role::grader, {}, {grader_says(2, {"**Fallacy:** the key step assumes the claim."})});
  s.on(Role::solver, {}, {solver_says("CIRCULAR-PROOF: assume the result, conclude the result.")});
  s.on(Role::extractor, {}, {"Conjecture 1: LOOP-C. Negation of Conjecture 1: not LOOP-C."});
  s.on(Role::parser, {}, {parser_says({"LOOP-C: the gadget is cyclic"}, {"NEG-LOOP-C: the gadget is acyclic"})});
  s.on(Role::judge, {}, {"<decision>B</decision>"});
  return s;
}

Script cognitive_well() {
  Script s;
  s.backend_id = "scripted";
  s.on(Role::processor, {}, {"NO_ISSUES"});

  // Graders key on the proof text they are shown.
  s.on(Role::grader, {"CORRECT-PROOF"}, {grader_says(7)});
  s.on(Role::grader, {"NEG-PROOF"}, {grader_says(7)});
  s.on(Role::grader, {"GAP-PROOF"}, {grader_says(7)});
  s.on(Role::grader, {"C1-PROOF-ATTEMPT"},
       {grader_says(2, {"**Fallacy:** the colouring argument silently assumes G is bipartite."})});
  s.on(Role::grader, {"WRONG-PROOF"},
       {grader_says(6, {"**Slip:** the boundary case of an isolated widget is not handled."},
                    {"What changes when a widget has no neighbours?"})});

  // Side solves of a hypothesis pair see the hypothesis as their problem.
  s.on(Role::solver, {"The Problem:** C1-STATEMENT"},
       {solver_says("C1-PROOF-ATTEMPT: 2-colour G greedily; conflicts never arise.")});
  s.on(Role::solver, {"The Problem:** NEG-C1"},
       {solver_says("NEG-PROOF: the odd cycle W1-W2-W3 is a counterexample to bipartiteness.")});
  s.on(Role::solver, {"The Problem:** GAP-C2"}, {solver_says("GAP-PROOF: follows from the handshake lemma.")});
  s.on(Role::solver, {"The Problem:** NEG-GAP-C2"}, {solver_says("GAP-PROOF: by parity of degrees.")});
  // With the negation proven, the solver escapes the well.
  s.on(Role::solver, {"Proven lemma", "NEG-C1"},
       {solver_says("CORRECT-PROOF: G has an odd cycle, so argue by the colour classes of a spanning tree.")});
  s.on(Role::solver, {}, {solver_says("WRONG-PROOF: G is bipartite, so 2-colour it red and blue.")});

  s.on(Role::extractor, {"Independent grading reports"},
       {"**List of Conjecture(s):**\nConjecture 1: GAP-C2 isolated widgets exist.\n"
        "**Negation of Conjectures:**\nNegation of Conjecture 1: NEG-GAP-C2 no widget is isolated.\n"});
  s.on(Role::extractor, {},
       {"**List of Conjecture(s):**\nConjecture 1: C1-STATEMENT G is bipartite.\n"
        "**Negation of Conjectures:**\nNegation of Conjecture 1: NEG-C1 G contains an odd cycle.\n"});
  s.on(Role::parser, {"GAP-C2"},
       {parser_says({"GAP-C2 some widget of G is isolated."}, {"NEG-GAP-C2 no widget of G is isolated."})});
  s.on(Role::parser, {},
       {parser_says({"C1-STATEMENT the widget graph G is bipartite."}, {"NEG-C1 the widget graph G contains an odd cycle."})});
  s.on(Role::judge, {}, {"Solution A is complete.\n<decision>A</decision>"});
  return s;
}

}  // namespace scenario

}  // namespace proofloop::testkit
