#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proofloop/core/types.hpp"

namespace proofloop::metrics {

inline constexpr std::array<int, 4> kLabels{0, 1, 6, 7};

// 0 -> 0, 1..3 -> 1, 4..6 -> 6, 7 -> 7.
int bucketize(int score);
// Nearest integer, halves rounded up; InvalidArgument outside [0, 7].
int round_prediction(double predicted);

// Exact fraction kept in lowest terms.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Ratio of(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;  // "num/den"
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct MetricsReport {
  std::int64_t n = 0;
  Ratio acc;
  Ratio merged_acc;  // 0 and 1 buckets counted as one
  Ratio mae;         // mean |bucket(pred) - human| / 7
  std::optional<Ratio> fpr;  // unset when no record has human <= 5
  std::optional<Ratio> fnr;  // unset when no record has human >= 6
  // Row = human bucket, column = predicted bucket, both in kLabels order.
  std::array<std::array<std::int64_t, 4>, 4> confusion{};

  nlohmann::json to_json() const;
};

// InvalidArgument on empty input or an out-of-range record.
MetricsReport compute_metrics(std::span<const GradingRecord> records);

// Grid with row and column totals; zeros are printed.
std::string render_confusion(const MetricsReport& report);
std::string confusion_csv(const MetricsReport& report);
// Human-readable summary; fractions shown as percentages, undefined as n/a.
std::string render_report(const MetricsReport& report);
// One metric per row: metric,value,fraction.
std::string report_csv(const MetricsReport& report);

// CSV with a header naming human and predicted (problem_id optional), or
// JSONL objects with the same keys. SchemaError names the bad line; a file
// without records is an error too.
std::vector<GradingRecord> parse_records(const std::string& text);
std::vector<GradingRecord> read_records(const std::filesystem::path& path);

}  // namespace proofloop::metrics
