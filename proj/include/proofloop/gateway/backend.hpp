#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "proofloop/gateway/model.hpp"

namespace proofloop::gateway {

// A text-generation provider. Implementations throw TransientBackendError
// for retryable failures and BackendFailure for everything else.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string id() const = 0;
  // "scripted" or "http"; recorded in trace headers.
  virtual std::string kind() const = 0;
  virtual ModelResponse generate(const ModelRequest& request) = 0;

  // Upper bound on the input tokens `generate` will report for `prompt`.
  virtual std::int64_t estimate_input_tokens(std::string_view prompt) const = 0;

  virtual bool deterministic() const { return false; }
  virtual nlohmann::json snapshot() const { return nlohmann::json::object(); }
  virtual void restore(const nlohmann::json& /*state*/) {}
};

}  // namespace proofloop::gateway
