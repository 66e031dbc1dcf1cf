#include "proofloop/conjecture/engine.hpp"

#include <array>
#include <sstream>

#include "proofloop/conjecture/parse.hpp"
#include "proofloop/core/errors.hpp"
#include "proofloop/core/parallel.hpp"
#include "proofloop/dialectic/parsing.hpp"

using nlohmann::json;

namespace proofloop::conjecture {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::positive: return "positive";
    case Verdict::negative: return "negative";
    case Verdict::ambiguous: return "ambiguous";
  }
  return "?";
}

Verdict classify(int g_pos, int g_neg, int tau) {
  if (g_pos >= tau && g_neg < tau) return Verdict::positive;
  if (g_neg >= tau && g_pos < tau) return Verdict::negative;
  return Verdict::ambiguous;
}

namespace {

std::string serialize_seeds(const std::vector<CandidateSolution>& seeds) {
  std::ostringstream out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out << "\n\n";
    out << "### Proof " << i + 1;
    if (seeds[i].grade) out << " (graded " << seeds[i].grade->score() << "/7)";
    out << "\n" << seeds[i].proof_text;
  }
  return out.str();
}

}  // namespace

ConjectureEngine::ConjectureEngine(dialectic::DialecticEngine& dialectic) : dialectic_(dialectic) {}

ExtractionResult ConjectureEngine::extract_hypotheses(const Problem& problem,
                                                      const std::vector<CandidateSolution>& seeds,
                                                      const std::vector<Lemma>& lemmas,
                                                      const std::vector<FailedPair>& failures,
                                                      const dialectic::CallSite& site,
                                                      const ExtractOptions& options) {
  if (seeds.empty()) throw InvalidArgument("extract_hypotheses needs at least one seed");
  if (options.max_pairs < 0) throw InvalidArgument("max_pairs must be >= 0");

  dialectic::SolveContext materials = dialectic::SolveContext::for_problem(problem);
  materials.lemmas = lemmas;
  materials.failures = failures;
  materials.notes = options.notes;

  auto extracted = dialectic_.call(Role::extractor, prompts::TemplateId::conjecture_extractor,
                                   {{"problem", problem.statement},
                                    {"solution", serialize_seeds(seeds)},
                                    {"additional_materials", materials.serialize()}},
                                   site);
  dialectic_.record(site, "extract", json{{"seeds", seeds.size()}, {"chars", extracted.text.size()}}, &extracted);

  std::optional<ParsedConjectures> parsed;
  std::string last_error;
  for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
    std::string input = extracted.text;
    if (attempt > 0) {
      input += "\n\nNote: your previous reply could not be used (" + last_error +
               "). Reply with the strict JSON object only.";
    }
    auto r = dialectic_.call(Role::parser, prompts::TemplateId::conjecture_parser, {{"solution", input}}, site);
    try {
      parsed = parse_conjectures(r.text);
      dialectic_.record(site, "parse", json{{"attempt", attempt + 1}, {"pairs", parsed->conjectures.size()}}, &r);
    } catch (const Error& e) {
      last_error = e.what();
      dialectic_.record(site, "parse", json{{"attempt", attempt + 1}, {"error", last_error}}, &r);
    }
  }
  if (!parsed) throw ExtractionFailure("conjecture parsing failed after a retry: " + last_error);

  ExtractionResult out;
  out.rewritten_proof = parsed->proof.empty() ? seeds.front().proof_text : parsed->proof;
  const auto keep = std::min(parsed->conjectures.size(), static_cast<std::size_t>(options.max_pairs));
  out.dropped_by_budget = parsed->conjectures.size() - keep;
  if (out.dropped_by_budget > 0) {
    dialectic_.record(site, "truncate", json{{"found", parsed->conjectures.size()}, {"kept", keep}});
  }

  std::vector<std::string> sources;
  for (const auto& s : seeds) sources.push_back(s.id);
  for (std::size_t i = 0; i < keep; ++i) {
    HypothesisPair p;
    p.id = options.next_id ? options.next_id() : site.sub("h" + std::to_string(i + 1)).lane;
    p.conjecture = parsed->conjectures[i];
    p.negation = parsed->negations[i];
    p.source_solution_ids = sources;
    for (const auto* side : {&p.conjecture, &p.negation}) {
      for (const auto& phrase : referential_phrases(*side)) {
        out.warnings.push_back(p.id + ": '" + phrase + "' in \"" + *side + "\"");
      }
    }
    out.pairs.push_back(std::move(p));
  }
  if (!out.warnings.empty()) dialectic_.record(site, "lint", json{{"warnings", out.warnings}});
  return out;
}

ConjectureEngine::SideOutcome ConjectureEngine::run_side(const HypothesisPair& pair, bool positive,
                                                         const dialectic::CallSite& site) {
  SideOutcome out;
  // Detached: the side statement is the whole problem, nothing else is shown.
  Problem side{pair.id + (positive ? "/pos" : "/neg"), positive ? pair.conjecture : pair.negation, std::nullopt};
  try {
    auto r = dialectic_.solver_call(side, "", site);
    out.attempt = dialectic::extract_proof_text(r.text);
    dialectic_.record(site, "side_solve", json{{"side", positive ? "pos" : "neg"}, {"chars", out.attempt.size()}},
                      &r);
    out.grade = dialectic_.grade(side, out.attempt, "", site, nullptr, "side_grade").score();
  } catch (const PoolExhausted& e) {
    out.error = std::string("pool exhausted: ") + e.what();
  } catch (const BudgetExceeded& e) {
    out.error = std::string("budget exhausted: ") + e.what();
    out.budget = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

VerifyResult ConjectureEngine::verify_hypotheses(const std::vector<HypothesisPair>& pairs, int tau,
                                                 const dialectic::CallSite& site) {
  if (tau < 0 || tau > 7) throw InvalidArgument("tau must be within 0..7");
  for (const auto& p : pairs) p.validate();

  const std::size_t n = pairs.size();
  const auto& config = dialectic_.config();
  std::vector<std::array<SideOutcome, 2>> sides(n);
  std::vector<std::array<EventBuffer, 2>> buffers(n);

  auto errors = parallel_for(n, config.max_workers, [&](std::size_t i) {
    dialectic::CallSite pair_site = site.sub("h" + std::to_string(i + 1));
    if (config.pair_token_budget > 0) pair_site.pool = std::make_shared<gateway::TokenPool>(config.pair_token_budget);
    auto side_errors = parallel_for(2, 2, [&](std::size_t s) {
      dialectic::CallSite side_site = pair_site.sub(s == 0 ? "pos" : "neg");
      side_site.events = &buffers[i][s];
      sides[i][s] = run_side(pairs[i], s == 0, side_site);
    });
    rethrow_first(side_errors);
  });
  rethrow_first(errors);

  VerifyResult out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pos = sides[i][0];
    const auto& neg = sides[i][1];
    out.budget_exhausted = out.budget_exhausted || pos.budget || neg.budget;

    json data{{"pair", pairs[i].id}};
    if (pos.grade) data["g_pos"] = *pos.grade;
    if (neg.grade) data["g_neg"] = *neg.grade;

    if (pos.grade && neg.grade) {
      Verdict v = classify(*pos.grade, *neg.grade, tau);
      data["verdict"] = to_string(v);
      if (v == Verdict::ambiguous) {
        out.failed.push_back(FailedPair{pairs[i], FailureReason::ambiguous, pos.grade, neg.grade, pos.attempt,
                                        neg.attempt, ""});
      } else {
        bool positive = v == Verdict::positive;
        Lemma l;
        l.statement = positive ? pairs[i].conjecture : pairs[i].negation;
        l.polarity = positive ? Polarity::positive : Polarity::negative;
        l.proof_text = positive ? pos.attempt : neg.attempt;
        l.g_pos = *pos.grade;
        l.g_neg = *neg.grade;
        l.pair_id = pairs[i].id;
        l.threshold = tau;
        out.proven.push_back(std::move(l));
      }
    } else {
      std::string detail;
      if (!pos.error.empty()) detail += "pos: " + pos.error;
      if (!neg.error.empty()) detail += (detail.empty() ? "" : "; ") + std::string("neg: ") + neg.error;
      data["verdict"] = "unresolved";
      data["detail"] = detail;
      out.failed.push_back(FailedPair{pairs[i], FailureReason::unresolved, pos.grade, neg.grade, pos.attempt,
                                      neg.attempt, detail});
    }

    if (site.events) {
      site.events->append(buffers[i][0].take());
      site.events->append(buffers[i][1].take());
      site.events->add(site.phase, "pair_result", site.sub("h" + std::to_string(i + 1)).lane, std::move(data));
    }
  }
  return out;
}

}  // namespace proofloop::conjecture
