#include "proofloop/dialectic/context.hpp"

#include <sstream>

#include "proofloop/core/digest.hpp"

namespace proofloop::dialectic {

SolveContext SolveContext::for_problem(const Problem& p) {
  SolveContext ctx;
  if (p.additional_materials && !p.additional_materials->empty()) ctx.hints = p.additional_materials;
  return ctx;
}

bool SolveContext::empty() const {
  return !hints && lemmas.empty() && failures.empty() && feedback.empty() && scaffolding.empty() &&
         prior_solutions.empty() && notes.empty();
}

void SolveContext::add_prior(const CandidateSolution& s) {
  prior_solutions.push_back({s.id, s.proof_text, s.grade ? std::optional<int>(s.score()) : std::nullopt});
}

std::string SolveContext::serialize() const {
  std::ostringstream out;
  auto section = [&](const std::string& title) {
    if (out.tellp() > 0) out << "\n";
    out << "### " << title << "\n";
  };
  if (hints) {
    section("Hints supplied with the problem");
    out << *hints << "\n";
  }
  if (!lemmas.empty()) {
    section("Proven lemmas (each verified by an independent grader; you may cite them)");
    int i = 0;
    for (const auto& l : lemmas) {
      out << "Lemma " << ++i << ": " << l.statement << "\n";
      out << "Proof of Lemma " << i << ":\n" << l.proof_text << "\n";
    }
  }
  if (!failures.empty()) {
    section("Conjectures that could not be settled (avoid relying on them)");
    int i = 0;
    for (const auto& f : failures) {
      out << ++i << ". " << f.pair.conjecture << " [" << to_string(f.reason);
      if (f.g_pos && f.g_neg) out << "; conjecture " << *f.g_pos << "/7, negation " << *f.g_neg << "/7";
      out << "]\n";
      out << "   Negation: " << f.pair.negation << "\n";
      if (!f.pos_attempt.empty()) out << "   Partial progress on the conjecture:\n" << f.pos_attempt << "\n";
      if (!f.neg_attempt.empty()) out << "   Partial progress on the negation:\n" << f.neg_attempt << "\n";
    }
  }
  if (!feedback.empty()) {
    section("Feedback to address");
    for (const auto& f : feedback) out << "- " << f << "\n";
  }
  if (!scaffolding.empty()) {
    section("Scaffolding questions");
    for (const auto& q : scaffolding) out << "- " << q << "\n";
  }
  if (!prior_solutions.empty()) {
    section("Prior solution attempts");
    for (const auto& s : prior_solutions) {
      out << "#### Attempt " << s.id;
      if (s.score) out << " (graded " << *s.score << "/7)";
      out << "\n" << s.proof_text << "\n";
    }
  }
  for (const auto& n : notes) {
    section(n.label);
    out << n.text << "\n";
  }
  return out.str();
}

std::string SolveContext::digest() const { return short_digest(serialize()); }

}  // namespace proofloop::dialectic
