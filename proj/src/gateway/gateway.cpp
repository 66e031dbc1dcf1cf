#include "proofloop/gateway/gateway.hpp"

#include <chrono>
#include <thread>

#include "proofloop/core/errors.hpp"

namespace proofloop::gateway {

void ModelRequest::validate() const {
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
  if (max_output_tokens <= 0) throw InvalidArgument("max_output_tokens must be > 0");
  if (prompt.empty()) throw InvalidArgument("prompt must be non-empty");
}

Gateway::Gateway(std::shared_ptr<Backend> backend, PriceTable prices, GatewayOptions options)
    : backend_(std::move(backend)), options_(options) {
  if (!backend_) throw InvalidArgument("gateway needs a backend");
  if (options_.token_budget <= 0) throw InvalidArgument("token_budget must be > 0");
  if (options_.max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
  prices_ = prices.at(backend_->id());
}

void Gateway::admit(const ModelRequest& request, std::int64_t reservation,
                    std::int64_t input_estimate) {
  if (request.pool && request.pool->exhausted()) {
    throw PoolExhausted("token pool exhausted for lane " + request.lane);
  }
  std::unique_lock lock(mu_);
  const std::int64_t budget = options_.token_budget;
  for (;;) {
    if (exhausted_ || consumed_ >= budget) {
      exhausted_ = true;
      throw BudgetExceeded("token budget exhausted");
    }
    if (consumed_ + reserved_ + reservation <= budget) break;
    if (in_flight_ == 0) {
      if (!options_.strict_budget && consumed_ + input_estimate < budget) break;
      exhausted_ = true;
      throw BudgetExceeded("token budget cannot admit call on lane " + request.lane);
    }
    drained_.wait(lock);
  }
  reserved_ += reservation;
  ++in_flight_;
}

void Gateway::release(std::int64_t reservation, std::int64_t charged) {
  {
    std::lock_guard lock(mu_);
    reserved_ -= reservation;
    consumed_ += charged;
    --in_flight_;
  }
  drained_.notify_all();
}

ModelResponse Gateway::complete(const ModelRequest& request) {
  request.validate();
  const std::int64_t input_estimate = backend_->estimate_input_tokens(request.prompt);
  const std::int64_t reservation = input_estimate + request.max_output_tokens;

  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    admit(request, reservation, input_estimate);
    ModelResponse response;
    try {
      auto start = std::chrono::steady_clock::now();
      response = backend_->generate(request);
      response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    } catch (const TransientBackendError& e) {
      release(reservation, 0);
      last_error = e.what();
      if (attempt < options_.max_attempts) {
        std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
      }
      continue;
    } catch (...) {
      release(reservation, 0);
      throw;
    }

    const Usage& u = response.usage;
    if (u.input_tokens < 0 || u.output_tokens < 0 || u.thinking_tokens < 0) {
      release(reservation, 0);
      throw BackendFailure("backend reported negative token counts");
    }
    CostEntry entry;
    entry.run_id = request.run_id;
    entry.lane = request.lane;
    entry.role = request.role;
    entry.backend_id = response.backend_id.empty() ? backend_->id() : response.backend_id;
    entry.usage = u;
    entry.usd = cost_of(u, prices_);
    entry = ledger_.append(entry);
    if (request.pool) request.pool->charge(u.total());
    release(reservation, u.total());

    Observer observer;
    {
      std::lock_guard lock(mu_);
      observer = observer_;
    }
    if (observer) observer(request, response, entry);
    return response;
  }
  throw BackendFailure("backend failed after " + std::to_string(options_.max_attempts) +
                       " attempts: " + last_error);
}

std::int64_t Gateway::consumed() const {
  std::lock_guard lock(mu_);
  return consumed_;
}

std::int64_t Gateway::remaining() const {
  std::lock_guard lock(mu_);
  return std::max<std::int64_t>(0, options_.token_budget - consumed_);
}

bool Gateway::exhausted() const {
  std::lock_guard lock(mu_);
  return exhausted_ || consumed_ >= options_.token_budget;
}

void Gateway::restore_ledger(std::vector<CostEntry> entries) {
  ledger_.reset(std::move(entries));
  std::lock_guard lock(mu_);
  consumed_ = ledger_.tokens_consumed();
  exhausted_ = false;
}

void Gateway::set_observer(Observer observer) {
  std::lock_guard lock(mu_);
  observer_ = std::move(observer);
}

}  // namespace proofloop::gateway
