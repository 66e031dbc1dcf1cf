#pragma once

// Canonical JSON forms for the core types. Field names are stable; they are
// the schema of trace lines and checkpoint files.

#include <nlohmann/json.hpp>

#include "proofloop/core/run_state.hpp"
#include "proofloop/core/trace_event.hpp"
#include "proofloop/core/types.hpp"

namespace proofloop {

void to_json(nlohmann::json& j, const Problem& p);
void from_json(const nlohmann::json& j, Problem& p);
void to_json(nlohmann::json& j, const Issue& i);
void from_json(const nlohmann::json& j, Issue& i);
void to_json(nlohmann::json& j, const CandidateSolution& s);
void from_json(const nlohmann::json& j, CandidateSolution& s);
void to_json(nlohmann::json& j, const HypothesisPair& p);
void from_json(const nlohmann::json& j, HypothesisPair& p);
void to_json(nlohmann::json& j, const Lemma& l);
void from_json(const nlohmann::json& j, Lemma& l);
void to_json(nlohmann::json& j, const FailedPair& f);
void from_json(const nlohmann::json& j, FailedPair& f);
void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);
void to_json(nlohmann::json& j, const GradingRecord& r);
void from_json(const nlohmann::json& j, GradingRecord& r);
void to_json(nlohmann::json& j, const RunState& s);
void from_json(const nlohmann::json& j, RunState& s);
void to_json(nlohmann::json& j, const TraceEvent& e);
void from_json(const nlohmann::json& j, TraceEvent& e);

}  // namespace proofloop

namespace nlohmann {

template <>
struct adl_serializer<proofloop::GradeReport> {
  static void to_json(json& j, const proofloop::GradeReport& g);
  static proofloop::GradeReport from_json(const json& j);
};

}  // namespace nlohmann
