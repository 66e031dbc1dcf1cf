#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proofloop/core/money.hpp"
#include "proofloop/core/types.hpp"
#include "proofloop/gateway/model.hpp"

namespace proofloop::gateway {

struct CostEntry {
  std::uint64_t seq = 0;  // append order
  std::string run_id;
  std::string lane;
  int lane_seq = 0;  // position of the call within its lane
  Role role = Role::solver;
  std::string backend_id;
  Usage usage;
  Usd usd;

  friend bool operator==(const CostEntry&, const CostEntry&) = default;
};

void to_json(nlohmann::json& j, const CostEntry& e);
void from_json(const nlohmann::json& j, CostEntry& e);

struct LedgerTotals {
  Usd grand;
  std::int64_t tokens = 0;
  std::map<Role, Usd> by_role;
  std::map<Role, std::int64_t> calls_by_role;
  std::map<Role, std::int64_t> tokens_by_role;
  std::map<std::string, Usd> by_run;
  std::map<std::string, std::int64_t> tokens_by_run;
};

// Append-only, thread-safe record of every completed model call.
class CostLedger {
 public:
  CostLedger() = default;
  CostLedger(const CostLedger& other);
  CostLedger& operator=(const CostLedger& other);

  // Assigns seq and lane_seq, returns the stored entry.
  CostEntry append(CostEntry entry);
  // Re-seeds the ledger (checkpoint restore). Entries keep their lane_seq.
  void reset(std::vector<CostEntry> entries);

  std::vector<CostEntry> entries() const;
  // Entries sorted by (run, lane, lane_seq): independent of thread timing.
  std::vector<CostEntry> canonical_entries() const;
  std::vector<CostEntry> entries_for_run(const std::string& run_id) const;
  LedgerTotals totals() const;
  Usd grand_total() const;
  std::int64_t tokens_consumed() const;
  std::size_t size() const;

  nlohmann::json to_json() const;
  static CostLedger from_json(const nlohmann::json& j);
  std::string to_csv() const;
  static CostLedger from_csv(const std::string& text);

 private:
  mutable std::mutex mu_;
  std::vector<CostEntry> entries_;
  std::map<std::string, int> lane_counters_;
  std::int64_t tokens_ = 0;
};

// Table-1 shaped text report: one row per run, a combined row, then the
// per-role breakdown.
std::string render_cost_table(const LedgerTotals& totals);

}  // namespace proofloop::gateway
