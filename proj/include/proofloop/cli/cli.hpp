#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proofloop/core/types.hpp"
#include "proofloop/gateway/backend_config.hpp"
#include "proofloop/prompts/registry.hpp"

namespace proofloop::cli {

// Stable process exit codes.
enum class ExitCode : int {
  ok = 0,                // verified solution, or the command succeeded
  best_effort = 1,       // a solution that did not verify; replay divergence
  budget_exhausted = 2,  // stopped by the token budget
  usage = 64,            // bad flags or an invalid configuration
  data = 65,             // malformed input file, refused replay, version mismatch
  internal = 70,         // unexpected failure
  io = 74,               // cannot read or write a file
};

// Problem files: `key: value` header lines (id is required), then a
// `--- statement ---` line and the statement, then optionally a
// `--- materials ---` line and unverified hints.
Problem parse_problem(const std::string& text);
Problem read_problem(const std::filesystem::path& path);
std::string format_problem(const Problem& problem);

// Everything a solve needs besides the problem.
struct CliConfig {
  gateway::BackendConfig backend;
  bool backend_configured = false;  // a [backend] section or --script was given
  PipelineConfig pipeline = PipelineConfig::pb_adv_defaults();
  std::optional<std::filesystem::path> templates_dir;
  std::vector<std::pair<prompts::TemplateId, std::filesystem::path>> template_overrides;
};

// Reads [pipeline] and [templates] on top of the defaults plus the backend
// sections. Paths are resolved against base_dir. InvalidArgument on unknown
// keys or bad values.
CliConfig config_from_ini(const gateway::IniSections& ini, const std::filesystem::path& base_dir = {});

prompts::PromptRegistry load_prompts(const CliConfig& config);

// Entry point; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proofloop::cli
