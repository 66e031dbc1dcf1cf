#include "proofloop/gateway/pricing.hpp"

#include "proofloop/core/errors.hpp"

namespace proofloop::gateway {

const PriceEntry& PriceTable::at(const std::string& backend_id) const {
  auto it = entries_.find(backend_id);
  if (it == entries_.end()) throw InvalidArgument("no price entry for backend '" + backend_id + "'");
  return it->second;
}

PriceTable PriceTable::reference() {
  PriceTable t;
  t.set("flat-10", {Rate::parse("10"), Rate::parse("10")});
  t.set("scripted", {Rate::parse("10"), Rate::parse("10")});
  // DeepSeek V3.2 hosted list price (cache-miss input / output).
  t.set("deepseek-v3.2", {Rate::parse("0.28"), Rate::parse("0.42")});
  return t;
}

Usd cost_of(const Usage& usage, const PriceEntry& prices) {
  if (usage.input_tokens < 0 || usage.output_tokens < 0 || usage.thinking_tokens < 0) {
    throw InvalidArgument("negative token usage");
  }
  return prices.input.cost(usage.input_tokens) +
         prices.output.cost(usage.output_tokens + usage.thinking_tokens);
}

Usd estimate_max_budget(std::int64_t tokens_per_call, std::int64_t calls_per_round,
                        std::int64_t rounds, std::int64_t parallel_runs, Rate usd_per_million) {
  if (tokens_per_call <= 0 || calls_per_round <= 0 || rounds <= 0 || parallel_runs <= 0) {
    throw InvalidArgument("estimate inputs must be positive");
  }
  if (usd_per_million.micro_per_million() <= 0) {
    throw InvalidArgument("estimate rate must be positive");
  }
  std::int64_t tokens = 0;
  if (__builtin_mul_overflow(tokens_per_call, calls_per_round, &tokens) ||
      __builtin_mul_overflow(tokens, rounds, &tokens) ||
      __builtin_mul_overflow(tokens, parallel_runs, &tokens)) {
    throw InvalidArgument("estimate token count overflows");
  }
  return usd_per_million.cost(tokens);
}

}  // namespace proofloop::gateway
