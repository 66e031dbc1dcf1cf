#pragma once

#include <string>

#include "proofloop/gateway/backend.hpp"

namespace proofloop::gateway {

struct HttpBackendConfig {
  std::string id;
  std::string endpoint;     // base URL, e.g. "https://api.example.com/v1"
  std::string model;
  std::string api_key_env;  // name of the env var holding the bearer token
  int timeout_s = 600;
};

// OpenAI-compatible chat-completions client. 429, 5xx and network errors are
// transient; other HTTP failures and malformed bodies are terminal.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string id() const override { return config_.id; }
  std::string kind() const override { return "http"; }
  ModelResponse generate(const ModelRequest& request) override;
  // One token per byte: never below what a BPE tokenizer reports.
  std::int64_t estimate_input_tokens(std::string_view prompt) const override {
    return static_cast<std::int64_t>(prompt.size());
  }

  const HttpBackendConfig& config() const { return config_; }

 private:
  HttpBackendConfig config_;
  std::string scheme_host_;
  std::string base_path_;
};

// Parses a chat-completions response body. Exposed for tests.
ModelResponse parse_chat_completion(const std::string& body, const std::string& backend_id);

}  // namespace proofloop::gateway
