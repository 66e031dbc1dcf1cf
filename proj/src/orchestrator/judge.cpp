#include "proofloop/orchestrator/judge.hpp"

#include <regex>
#include <sstream>

#include "proofloop/dialectic/parsing.hpp"

using nlohmann::json;

namespace proofloop::orchestrator {

namespace {

struct Tag {
  Side side;
  std::size_t pos;
};

std::optional<Tag> last_tag(std::string_view text) {
  static const std::regex tag(R"(<decision>\s*([AaBb])\s*</decision>)", std::regex::icase);
  std::optional<Tag> last;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) {
    char c = (*it)[1].str()[0];
    last = Tag{(c == 'A' || c == 'a') ? Side::A : Side::B, static_cast<std::size_t>(it->position(0))};
  }
  return last;
}

}  // namespace

std::optional<Side> parse_decision(std::string_view text) {
  auto t = last_tag(text);
  if (!t) return std::nullopt;
  return t->side;
}

namespace {

void write_history(std::ostringstream& out, const std::string& label, const RunSummary& r) {
  out << "### Solution sequence of run " << label << " (" << r.run_id << ")\n";
  int i = 0;
  for (const auto& s : r.history) {
    out << "\n#### " << ++i << ". " << s.id << " (phase " << s.phase << ", " << to_string(s.origin);
    if (s.grade) out << ", graded " << s.grade->score() << "/7";
    out << ")\n" << s.proof_text << "\n";
  }
}

std::string justification_of(const std::string& text) {
  auto t = last_tag(text);
  return dialectic::trim(t ? text.substr(0, t->pos) : text);
}

}  // namespace

std::string render_history(const RunSummary& a, const RunSummary& b) {
  std::ostringstream out;
  write_history(out, "A", a);
  out << "\n";
  write_history(out, "B", b);
  return out.str();
}

JudgeDecision judge(dialectic::DialecticEngine& engine, const Problem& problem, const RunSummary& a,
                    const RunSummary& b, const dialectic::CallSite& site) {
  const prompts::Slots slots{{"problem", problem.statement},
                             {"solution_a", a.final_solution.proof_text},
                             {"solution_b", b.final_solution.proof_text},
                             {"additional_materials", render_history(a, b)}};
  JudgeDecision out;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    auto r = engine.call(Role::judge, prompts::TemplateId::answer_combiner, slots, site);
    auto side = parse_decision(r.text);
    engine.record(site, "judge",
                  json{{"attempt", attempt},
                       {"a", a.final_solution.id},
                       {"b", b.final_solution.id},
                       {"decision", side ? (*side == Side::A ? "A" : "B") : ""}},
                  &r);
    out.transcript = r.text;
    if (side) {
      out.winner = *side;
      out.justification = justification_of(r.text);
      return out;
    }
  }
  out.fallback = true;
  out.winner = better_candidate(b.final_solution, a.final_solution) ? Side::B : Side::A;
  engine.record(site, "judge_fallback", json{{"winner", out.winner == Side::A ? "A" : "B"}});
  return out;
}

}  // namespace proofloop::orchestrator
