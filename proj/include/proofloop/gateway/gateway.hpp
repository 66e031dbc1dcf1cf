#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>

#include "proofloop/gateway/backend.hpp"
#include "proofloop/gateway/ledger.hpp"
#include "proofloop/gateway/pricing.hpp"

namespace proofloop::gateway {

struct GatewayOptions {
  std::int64_t token_budget = 5'000'000;
  // Strict: a call is admitted only if input estimate + max_output_tokens
  // fits in what is left. Lenient (default): when nothing fits, one call at a
  // time may still start while consumed + input estimate < budget, so the
  // total never exceeds token_budget + that call's max_output_tokens.
  bool strict_budget = false;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{20};
};

// Thread-safe front door for every model call: budget admission, retry,
// pricing and ledger bookkeeping.
class Gateway {
 public:
  using Observer = std::function<void(const ModelRequest&, const ModelResponse&, const CostEntry&)>;

  // Throws InvalidArgument if `prices` has no entry for the backend.
  Gateway(std::shared_ptr<Backend> backend, PriceTable prices, GatewayOptions options = {});

  ModelResponse complete(const ModelRequest& request);

  Backend& backend() { return *backend_; }
  const Backend& backend() const { return *backend_; }
  const PriceEntry& prices() const { return prices_; }
  const GatewayOptions& options() const { return options_; }
  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }

  std::int64_t consumed() const;
  std::int64_t remaining() const;
  // True once a call has been refused for lack of run-wide budget.
  bool exhausted() const;

  // Seeds the ledger and token counter from a checkpoint.
  void restore_ledger(std::vector<CostEntry> entries);
  void set_observer(Observer observer);

 private:
  void admit(const ModelRequest& request, std::int64_t reservation, std::int64_t input_estimate);
  void release(std::int64_t reservation, std::int64_t charged);

  std::shared_ptr<Backend> backend_;
  PriceEntry prices_;
  GatewayOptions options_;
  CostLedger ledger_;
  Observer observer_;

  mutable std::mutex mu_;
  std::condition_variable drained_;
  std::int64_t consumed_ = 0;
  std::int64_t reserved_ = 0;
  int in_flight_ = 0;
  bool exhausted_ = false;
};

}  // namespace proofloop::gateway
