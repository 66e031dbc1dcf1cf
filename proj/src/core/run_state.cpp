#include "proofloop/core/run_state.hpp"

#include <array>
#include <cstdio>

#include "proofloop/core/errors.hpp"

namespace proofloop {
namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 5> kStages{{
    {Stage::phase1, "phase1"},
    {Stage::phase2, "phase2"},
    {Stage::phase3, "phase3"},
    {Stage::phase4, "phase4"},
    {Stage::done, "done"},
}};

constexpr std::array<std::pair<Termination, std::string_view>, 5> kTerminations{{
    {Termination::none, "none"},
    {Termination::verified, "verified"},
    {Termination::post_enhanced, "post_enhanced"},
    {Termination::best_effort, "best_effort"},
    {Termination::budget_exhausted, "budget_exhausted"},
}};

}  // namespace

std::string_view to_string(Stage s) {
  for (const auto& [v, n] : kStages) {
    if (v == s) return n;
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (const auto& [v, n] : kStages) {
    if (n == s) return v;
  }
  throw InvalidArgument("unknown stage: " + std::string(s));
}

std::string_view to_string(Termination t) {
  for (const auto& [v, n] : kTerminations) {
    if (v == t) return n;
  }
  return "?";
}

Termination termination_from_string(std::string_view s) {
  for (const auto& [v, n] : kTerminations) {
    if (n == s) return v;
  }
  throw InvalidArgument("unknown termination: " + std::string(s));
}

std::string RunState::next_solution_id(int phase) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-p%d-s%04d", run_id.c_str(), phase, next_solution_seq++);
  return buf;
}

std::string RunState::next_pair_id() {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-h%03d", run_id.c_str(), next_pair_seq++);
  return buf;
}

}  // namespace proofloop
