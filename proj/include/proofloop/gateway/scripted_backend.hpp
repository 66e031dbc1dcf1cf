#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "proofloop/gateway/backend.hpp"

namespace proofloop::gateway {

struct ScriptedResponse {
  std::string text;
  std::optional<std::int64_t> input_tokens;   // default: ceil(prompt bytes / 4)
  std::optional<std::int64_t> output_tokens;  // default: ceil(bytes / 4)
  std::int64_t thinking_tokens = 0;
  bool fail = false;  // raise a transient failure instead of answering
};

// Which calls share a rule's cursor. `lane` gives every lane its own
// position in the response list, so concurrent lanes replay identically
// regardless of scheduling. `global` shares one cursor across all callers.
enum class CursorScope { lane, global };

struct ScriptRule {
  std::string name;
  std::optional<Role> role;            // unset matches every role
  std::vector<std::string> contains;   // all must occur in the prompt
  std::vector<std::string> excludes;   // none may occur in the prompt
  std::optional<std::string> lane_regex;
  CursorScope scope = CursorScope::lane;
  std::vector<ScriptedResponse> responses;  // last one repeats once exhausted

  bool matches(const ModelRequest& request) const;
};

// Ordered rule list; the first matching rule answers.
struct Script {
  static constexpr int kVersion = 1;

  std::string backend_id = "scripted";
  std::vector<ScriptRule> rules;

  Script& on(Role role, std::vector<std::string> contains, std::vector<std::string> responses,
             std::vector<std::string> excludes = {});
  Script& on_any(std::vector<std::string> contains, std::vector<std::string> responses);

  nlohmann::json to_json() const;
  static Script from_json(const nlohmann::json& j);
  static Script load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string digest() const;
};

// Deterministic backend answering from a Script. Reported input tokens are
// ceil(prompt bytes / 4) unless the response pins them; output and thinking
// counts come from the script and are clipped to the request's
// max_output_tokens like a real API.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(Script script);

  std::string id() const override { return script_.backend_id; }
  std::string kind() const override { return "scripted"; }
  ModelResponse generate(const ModelRequest& request) override;
  std::int64_t estimate_input_tokens(std::string_view prompt) const override;
  bool deterministic() const override { return true; }
  nlohmann::json snapshot() const override;
  void restore(const nlohmann::json& state) override;

  const Script& script() const { return script_; }
  std::size_t calls() const;

 private:
  Script script_;
  mutable std::mutex mu_;
  std::map<std::pair<std::size_t, std::string>, std::size_t> cursors_;
  std::size_t calls_ = 0;
  std::int64_t max_pinned_input_ = 0;
};

std::int64_t approx_tokens(std::string_view text);

}  // namespace proofloop::gateway
