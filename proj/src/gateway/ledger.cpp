#include "proofloop/gateway/ledger.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "proofloop/core/errors.hpp"

using nlohmann::json;

namespace proofloop::gateway {
namespace {

constexpr const char* kCsvHeader =
    "seq,run_id,lane,lane_seq,role,backend_id,input_tokens,output_tokens,thinking_tokens,usd";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool canonical_less(const CostEntry& a, const CostEntry& b) {
  if (a.run_id != b.run_id) return a.run_id < b.run_id;
  if (a.lane != b.lane) return a.lane < b.lane;
  return a.lane_seq < b.lane_seq;
}

}  // namespace

void to_json(json& j, const CostEntry& e) {
  j = json{{"seq", e.seq},
           {"run_id", e.run_id},
           {"lane", e.lane},
           {"lane_seq", e.lane_seq},
           {"role", std::string(to_string(e.role))},
           {"backend_id", e.backend_id},
           {"input_tokens", e.usage.input_tokens},
           {"output_tokens", e.usage.output_tokens},
           {"thinking_tokens", e.usage.thinking_tokens},
           {"usd", e.usd.to_string()}};
}

void from_json(const json& j, CostEntry& e) {
  e.seq = j.value("seq", std::uint64_t{0});
  e.run_id = j.value("run_id", "");
  e.lane = j.value("lane", "");
  e.lane_seq = j.value("lane_seq", 0);
  e.role = role_from_string(j.at("role").get<std::string>());
  e.backend_id = j.value("backend_id", "");
  e.usage.input_tokens = j.at("input_tokens").get<std::int64_t>();
  e.usage.output_tokens = j.at("output_tokens").get<std::int64_t>();
  e.usage.thinking_tokens = j.value("thinking_tokens", std::int64_t{0});
  e.usd = Usd::parse(j.value("usd", "0"));
}

CostLedger::CostLedger(const CostLedger& other) {
  std::lock_guard lock(other.mu_);
  entries_ = other.entries_;
  lane_counters_ = other.lane_counters_;
  tokens_ = other.tokens_;
}

CostLedger& CostLedger::operator=(const CostLedger& other) {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    entries_ = other.entries_;
    lane_counters_ = other.lane_counters_;
    tokens_ = other.tokens_;
  }
  return *this;
}

CostEntry CostLedger::append(CostEntry entry) {
  std::lock_guard lock(mu_);
  entry.seq = entries_.empty() ? 1 : entries_.back().seq + 1;
  entry.lane_seq = ++lane_counters_[entry.run_id + "|" + entry.lane];
  tokens_ += entry.usage.total();
  entries_.push_back(entry);
  return entry;
}

void CostLedger::reset(std::vector<CostEntry> entries) {
  std::lock_guard lock(mu_);
  entries_ = std::move(entries);
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const CostEntry& a, const CostEntry& b) { return a.seq < b.seq; });
  lane_counters_.clear();
  tokens_ = 0;
  std::uint64_t seq = 0;
  for (auto& e : entries_) {
    e.seq = std::max(e.seq, seq + 1);
    seq = e.seq;
    int& counter = lane_counters_[e.run_id + "|" + e.lane];
    counter = std::max(counter, e.lane_seq);
    tokens_ += e.usage.total();
  }
}

std::vector<CostEntry> CostLedger::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::vector<CostEntry> CostLedger::canonical_entries() const {
  auto out = entries();
  std::stable_sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<CostEntry> CostLedger::entries_for_run(const std::string& run_id) const {
  std::vector<CostEntry> out;
  std::lock_guard lock(mu_);
  for (const auto& e : entries_) {
    if (e.run_id == run_id) out.push_back(e);
  }
  return out;
}

LedgerTotals CostLedger::totals() const {
  LedgerTotals t;
  std::lock_guard lock(mu_);
  for (const auto& e : entries_) {
    t.grand += e.usd;
    t.tokens += e.usage.total();
    t.by_role[e.role] += e.usd;
    t.calls_by_role[e.role] += 1;
    t.tokens_by_role[e.role] += e.usage.total();
    t.by_run[e.run_id] += e.usd;
    t.tokens_by_run[e.run_id] += e.usage.total();
  }
  return t;
}

Usd CostLedger::grand_total() const {
  Usd total;
  std::lock_guard lock(mu_);
  for (const auto& e : entries_) total += e.usd;
  return total;
}

std::int64_t CostLedger::tokens_consumed() const {
  std::lock_guard lock(mu_);
  return tokens_;
}

std::size_t CostLedger::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

json CostLedger::to_json() const {
  auto t = totals();
  json by_role = json::object();
  for (const auto& [r, v] : t.by_role) by_role[std::string(to_string(r))] = v.to_string();
  json by_run = json::object();
  for (const auto& [r, v] : t.by_run) by_run[r] = v.to_string();
  return json{{"entries", canonical_entries()},
              {"totals",
               {{"grand_usd", t.grand.to_string()},
                {"tokens", t.tokens},
                {"by_role", by_role},
                {"by_run", by_run}}}};
}

CostLedger CostLedger::from_json(const json& j) {
  CostLedger ledger;
  const json& arr = j.is_array() ? j : j.at("entries");
  std::vector<CostEntry> entries;
  for (const auto& e : arr) entries.push_back(e.get<CostEntry>());
  ledger.reset(std::move(entries));
  return ledger;
}

std::string CostLedger::to_csv() const {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& e : canonical_entries()) {
    out << e.seq << ',' << e.run_id << ',' << e.lane << ',' << e.lane_seq << ','
        << to_string(e.role) << ',' << e.backend_id << ',' << e.usage.input_tokens << ','
        << e.usage.output_tokens << ',' << e.usage.thinking_tokens << ',' << e.usd.to_string()
        << "\n";
  }
  return out.str();
}

CostLedger CostLedger::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kCsvHeader)) {
    throw ParseError("ledger CSV: missing or unexpected header");
  }
  std::vector<CostEntry> entries;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 10) {
      throw ParseError("ledger CSV line " + std::to_string(lineno) + ": expected 10 fields");
    }
    try {
      CostEntry e;
      e.seq = std::stoull(f[0]);
      e.run_id = f[1];
      e.lane = f[2];
      e.lane_seq = std::stoi(f[3]);
      e.role = role_from_string(f[4]);
      e.backend_id = f[5];
      e.usage = {std::stoll(f[6]), std::stoll(f[7]), std::stoll(f[8])};
      e.usd = Usd::parse(f[9]);
      entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw ParseError("ledger CSV line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  CostLedger ledger;
  ledger.reset(std::move(entries));
  return ledger;
}

std::string render_cost_table(const LedgerTotals& totals) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %16s %14s\n", "Run", "Tokens", "Total Cost");
  out << buf;
  for (const auto& [run, usd] : totals.by_run) {
    auto tok = totals.tokens_by_run.count(run) ? totals.tokens_by_run.at(run) : 0;
    std::snprintf(buf, sizeof buf, "%-24s %16lld %14s\n", run.empty() ? "(unattributed)" : run.c_str(),
                  static_cast<long long>(tok), ("$" + usd.to_cents_string()).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-24s %16lld %14s\n", "Combined",
                static_cast<long long>(totals.tokens), ("$" + totals.grand.to_cents_string()).c_str());
  out << buf << "\n";
  std::snprintf(buf, sizeof buf, "%-24s %8s %16s %14s\n", "Role", "Calls", "Tokens", "Cost");
  out << buf;
  for (const auto& [role, usd] : totals.by_role) {
    std::snprintf(buf, sizeof buf, "%-24s %8lld %16lld %14s\n", std::string(to_string(role)).c_str(),
                  static_cast<long long>(totals.calls_by_role.at(role)),
                  static_cast<long long>(totals.tokens_by_role.at(role)),
                  ("$" + usd.to_string()).c_str());
    out << buf;
  }
  out << "Exact total: $" << totals.grand.to_string() << "\n";
  return out.str();
}

}  // namespace proofloop::gateway
