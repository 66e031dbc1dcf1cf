#include "proofloop/metrics/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/tokenizer.hpp>

#include "proofloop/core/errors.hpp"

using nlohmann::json;

namespace proofloop::metrics {

int bucketize(int score) {
  if (score < 0 || score > 7) throw InvalidArgument("score out of range 0..7: " + std::to_string(score));
  if (score == 0) return 0;
  if (score <= 3) return 1;
  if (score <= 6) return 6;
  return 7;
}

int round_prediction(double predicted) {
  if (!(predicted >= 0.0 && predicted <= 7.0)) {
    throw InvalidArgument("predicted grade out of range: " + std::to_string(predicted));
  }
  return static_cast<int>(std::floor(predicted + 0.5));
}

Ratio Ratio::of(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw InvalidArgument("ratio needs a positive denominator");
  const auto g = std::gcd(num, den);
  return g ? Ratio{num / g, den / g} : Ratio{0, 1};
}

std::string Ratio::str() const { return std::to_string(num) + "/" + std::to_string(den); }

namespace {

std::size_t label_index(int bucket) {
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    if (kLabels[i] == bucket) return i;
  }
  throw InvalidArgument("not a bucket label: " + std::to_string(bucket));
}

int merge_low(int bucket) { return bucket == 0 ? 1 : bucket; }

std::string percent(const std::optional<Ratio>& r) {
  if (!r) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << r->value() * 100.0 << "%";
  return out.str();
}

json ratio_json(const std::optional<Ratio>& r) {
  if (!r) return nullptr;
  return json{{"value", r->value()}, {"fraction", r->str()}};
}

}  // namespace

MetricsReport compute_metrics(std::span<const GradingRecord> records) {
  if (records.empty()) throw InvalidArgument("no grading records");
  MetricsReport r;
  r.n = static_cast<std::int64_t>(records.size());
  std::int64_t hits = 0, merged_hits = 0, abs_err = 0;
  std::int64_t low = 0, false_pos = 0, high = 0, false_neg = 0;
  for (const auto& rec : records) {
    rec.validate();
    const int pred = bucketize(round_prediction(rec.predicted));
    const int human = bucketize(rec.human);
    hits += pred == human;
    merged_hits += merge_low(pred) == merge_low(human);
    abs_err += std::abs(pred - rec.human);
    if (rec.human <= 5) {
      ++low;
      false_pos += pred >= 6;
    } else {
      ++high;
      false_neg += pred <= 5;
    }
    ++r.confusion[label_index(human)][label_index(pred)];
  }
  r.acc = Ratio::of(hits, r.n);
  r.merged_acc = Ratio::of(merged_hits, r.n);
  r.mae = Ratio::of(abs_err, 7 * r.n);
  if (low) r.fpr = Ratio::of(false_pos, low);
  if (high) r.fnr = Ratio::of(false_neg, high);
  return r;
}

json MetricsReport::to_json() const {
  json grid = json::array();
  for (const auto& row : confusion) grid.push_back(row);
  return json{{"n", n},
              {"acc", ratio_json(acc)},
              {"merged_acc", ratio_json(merged_acc)},
              {"mae", ratio_json(mae)},
              {"mae_normalizer", 7},
              {"fpr", ratio_json(fpr)},
              {"fnr", ratio_json(fnr)},
              {"labels", kLabels},
              {"confusion", grid}};
}

std::string render_confusion(const MetricsReport& report) {
  std::ostringstream out;
  out << "human\\pred";
  for (int l : kLabels) out << std::setw(7) << l;
  out << std::setw(8) << "total" << "\n";
  std::array<std::int64_t, 4> col{};
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    std::int64_t row = 0;
    out << std::setw(10) << kLabels[i];
    for (std::size_t j = 0; j < kLabels.size(); ++j) {
      out << std::setw(7) << report.confusion[i][j];
      row += report.confusion[i][j];
      col[j] += report.confusion[i][j];
    }
    out << std::setw(8) << row << "\n";
  }
  out << std::setw(10) << "total";
  for (auto c : col) out << std::setw(7) << c;
  out << std::setw(8) << report.n << "\n";
  return out.str();
}

std::string confusion_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "human\\pred";
  for (int l : kLabels) out << "," << l;
  out << ",total\n";
  std::array<std::int64_t, 4> col{};
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    std::int64_t row = 0;
    out << kLabels[i];
    for (std::size_t j = 0; j < kLabels.size(); ++j) {
      out << "," << report.confusion[i][j];
      row += report.confusion[i][j];
      col[j] += report.confusion[i][j];
    }
    out << "," << row << "\n";
  }
  out << "total";
  for (auto c : col) out << "," << c;
  out << "," << report.n << "\n";
  return out.str();
}

std::string render_report(const MetricsReport& report) {
  std::ostringstream out;
  out << "records: " << report.n << "\n";
  out << "(predictions rounded half-up, then bucketed to 0/1/6/7; MAE is mean |bucket - human| / 7)\n\n";
  out << "Acc        " << percent(report.acc) << "\n";
  out << "Acc (0+1)  " << percent(report.merged_acc) << "\n";
  out << "MAE        " << percent(report.mae) << "\n";
  out << "FPR        " << percent(report.fpr) << "   P(pred >= 6 | human <= 5)\n";
  out << "FNR        " << percent(report.fnr) << "   P(pred <= 5 | human >= 6)\n\n";
  out << render_confusion(report);
  return out.str();
}

std::string report_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << std::setprecision(17) << "metric,value,fraction\n";
  out << "n," << report.n << "," << report.n << "/1\n";
  auto row = [&](const char* name, const std::optional<Ratio>& r) {
    out << name << ",";
    if (r) {
      out << r->value() << "," << r->str();
    } else {
      out << "n/a,n/a";
    }
    out << "\n";
  };
  row("acc", report.acc);
  row("merged_acc", report.merged_acc);
  row("mae", report.mae);
  row("fpr", report.fpr);
  row("fnr", report.fnr);
  return out.str();
}

namespace {

std::string trimmed(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

int parse_int(const std::string& field, const std::string& where) {
  int v = 0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw SchemaError(where + ": human grade is not an integer: '" + field + "'");
  }
  return v;
}

double parse_double(const std::string& field, const std::string& where) {
  double v = 0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw SchemaError(where + ": predicted grade is not a number: '" + field + "'");
  }
  return v;
}

void check(const GradingRecord& r, const std::string& where) {
  try {
    r.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

std::vector<GradingRecord> parse_jsonl(const std::vector<std::string>& lines) {
  std::vector<GradingRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trimmed(lines[i]);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(where + ": not JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("human") || !j.contains("predicted")) {
      throw SchemaError(where + ": expected an object with human and predicted");
    }
    if (!j["human"].is_number_integer()) throw SchemaError(where + ": human grade is not an integer");
    if (!j["predicted"].is_number()) throw SchemaError(where + ": predicted grade is not a number");
    GradingRecord r;
    r.human = j["human"].get<int>();
    r.predicted = j["predicted"].get<double>();
    if (j.contains("problem_id") && !j["problem_id"].is_null()) {
      if (!j["problem_id"].is_string()) throw SchemaError(where + ": problem_id is not a string");
      r.problem_id = j["problem_id"].get<std::string>();
    }
    check(r, where);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GradingRecord> parse_csv(const std::vector<std::string>& lines) {
  using Tokens = boost::tokenizer<boost::escaped_list_separator<char>>;
  auto split = [](const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    try {
      Tokens tok(line);
      for (const auto& f : tok) fields.push_back(trimmed(f));
    } catch (const boost::escaped_list_error& e) {
      throw SchemaError(where + ": " + e.what());
    }
    return fields;
  };

  std::size_t first = 0;
  while (first < lines.size() && trimmed(lines[first]).empty()) ++first;
  const auto header = split(lines[first], "line " + std::to_string(first + 1));
  int human_col = -1, pred_col = -1, id_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "human") human_col = static_cast<int>(c);
    if (header[c] == "predicted") pred_col = static_cast<int>(c);
    if (header[c] == "problem_id") id_col = static_cast<int>(c);
  }
  if (human_col < 0 || pred_col < 0) {
    throw SchemaError("line " + std::to_string(first + 1) + ": header must name the human and predicted columns");
  }

  std::vector<GradingRecord> out;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (trimmed(lines[i]).empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    const auto f = split(lines[i], where);
    if (f.size() != header.size()) {
      throw SchemaError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(f.size()));
    }
    GradingRecord r;
    r.human = parse_int(f[human_col], where);
    r.predicted = parse_double(f[pred_col], where);
    if (id_col >= 0 && !f[id_col].empty()) r.problem_id = f[id_col];
    check(r, where);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<GradingRecord> parse_records(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  std::size_t first = 0;
  while (first < lines.size() && trimmed(lines[first]).empty()) ++first;
  if (first == lines.size()) throw SchemaError("no records: the input is empty");

  auto records = trimmed(lines[first]).front() == '{' ? parse_jsonl(lines) : parse_csv(lines);
  if (records.empty()) throw SchemaError("no records: found 0 records after the header");
  return records;
}

std::vector<GradingRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_records(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace proofloop::metrics
