#include "proofloop/orchestrator/selection.hpp"

#include <set>

#include "proofloop/core/errors.hpp"

namespace proofloop::orchestrator {

std::vector<CandidateSolution> distinct_ranked(std::span<const CandidateSolution> memory) {
  std::vector<CandidateSolution> out;
  std::set<std::string> seen;
  for (auto& s : ranked(memory)) {
    if (seen.insert(s.proof_text).second) out.push_back(std::move(s));
  }
  return out;
}

std::vector<CandidateSolution> select_top(std::span<const CandidateSolution> memory, int n) {
  if (n < 0) throw InvalidArgument("select_top needs n >= 0");
  auto all = distinct_ranked(memory);
  if (all.size() > static_cast<std::size_t>(n)) all.resize(static_cast<std::size_t>(n));
  return all;
}

dialectic::SolveContext select_kth_top(std::span<const CandidateSolution> memory, int k) {
  if (k < 1) throw InvalidArgument("select_kth_top needs k >= 1");
  dialectic::SolveContext ctx;
  auto all = distinct_ranked(memory);
  if (all.size() < static_cast<std::size_t>(k)) return ctx;
  const auto& s = all[static_cast<std::size_t>(k - 1)];
  ctx.add_prior(s);
  if (s.grade) {
    for (const auto& issue : s.grade->issues()) ctx.feedback.push_back(issue.text);
    ctx.scaffolding = s.grade->scaffolding();
  }
  return ctx;
}

}  // namespace proofloop::orchestrator
