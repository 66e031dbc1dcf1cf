#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "proofloop/core/money.hpp"
#include "proofloop/gateway/model.hpp"

namespace proofloop::gateway {

struct PriceEntry {
  Rate input;
  Rate output;  // also applied to thinking tokens
};

class PriceTable {
 public:
  void set(const std::string& backend_id, PriceEntry entry) { entries_[backend_id] = entry; }
  bool contains(const std::string& backend_id) const { return entries_.count(backend_id) > 0; }
  // Throws InvalidArgument for an unknown backend.
  const PriceEntry& at(const std::string& backend_id) const;
  const std::map<std::string, PriceEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // A few public list prices, for estimates and demos.
  static PriceTable reference();

 private:
  std::map<std::string, PriceEntry> entries_;
};

// input * in_rate / 1e6 + (output + thinking) * out_rate / 1e6, exactly.
Usd cost_of(const Usage& usage, const PriceEntry& prices);

// Worst-case spend for a fixed-shape pipeline:
// tokens_per_call * calls_per_round * rounds * parallel_runs * rate / 1e6.
// Throws InvalidArgument unless every count is positive.
Usd estimate_max_budget(std::int64_t tokens_per_call, std::int64_t calls_per_round,
                        std::int64_t rounds, std::int64_t parallel_runs, Rate usd_per_million);

}  // namespace proofloop::gateway
