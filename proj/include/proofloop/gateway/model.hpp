#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "proofloop/core/types.hpp"

namespace proofloop::gateway {

struct Usage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t thinking_tokens = 0;

  std::int64_t total() const { return input_tokens + output_tokens + thinking_tokens; }
  friend bool operator==(const Usage&, const Usage&) = default;
};

// A token sub-budget shared by a group of calls (e.g. the two sides of one
// bisection), so that a single runaway call cannot starve its siblings.
class TokenPool {
 public:
  explicit TokenPool(std::int64_t limit) : limit_(limit) {}

  std::int64_t limit() const { return limit_; }
  std::int64_t consumed() const {
    std::lock_guard lock(mu_);
    return consumed_;
  }
  bool exhausted() const {
    std::lock_guard lock(mu_);
    return consumed_ >= limit_;
  }
  void charge(std::int64_t tokens) {
    std::lock_guard lock(mu_);
    consumed_ += tokens;
  }

 private:
  const std::int64_t limit_;
  mutable std::mutex mu_;
  std::int64_t consumed_ = 0;
};

struct ModelRequest {
  Role role = Role::solver;
  std::string prompt;
  double temperature = 0.6;
  std::int64_t max_output_tokens = 32'000;
  std::string run_id;
  // Logical call chain this request belongs to ("r1/p1.i1/b2"). Calls within
  // one lane are issued sequentially.
  std::string lane;
  std::shared_ptr<TokenPool> pool;

  void validate() const;
};

struct ModelResponse {
  std::string text;
  Usage usage;
  std::string backend_id;
  std::int64_t latency_ms = 0;
};

}  // namespace proofloop::gateway
