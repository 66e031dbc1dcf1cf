#include "proofloop/dialectic/parsing.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "proofloop/core/errors.hpp"

namespace proofloop::dialectic {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

// "- x", "* x", "• x", "1. x", "2) x" -> "x"; anything else -> nullopt.
std::optional<std::string> bullet_body(const std::string& line) {
  static const std::regex bullet(R"(^\s*(?:[-*+]|\xE2\x80\xA2|\d{1,3}[.)])\s+(.*)$)");
  std::smatch m;
  if (std::regex_match(line, m, bullet)) return trim(m[1].str());
  return std::nullopt;
}

// Markdown emphasis stripped, used for headings and "None" detection.
std::string plain(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '*' && c != '_' && c != '#' && c != '`') out.push_back(c);
  }
  return trim(out);
}

bool is_heading(const std::string& line) {
  std::string t = trim(line);
  if (t.empty() || bullet_body(line)) return false;
  if (t.rfind("#", 0) == 0) return true;
  if (t.rfind("**", 0) == 0) {
    std::string p = plain(t);
    return !p.empty() && p.size() <= 80 && (p.back() == ':' || (t.size() >= 4 && t.substr(t.size() - 2) == "**"));
  }
  return false;
}

bool is_none_item(const std::string& item) {
  std::string p = lower(plain(item));
  while (!p.empty() && (p.back() == '.' || p.back() == '!')) p.pop_back();
  return p == "none" || p == "n/a" || p == "none found" || p == "no issues" || p.empty();
}

}  // namespace

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string extract_proof_text(std::string_view response) {
  auto lines = lines_of(response);
  std::optional<std::size_t> anchor;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lower(lines[i]).find("final blueprint") != std::string::npos) anchor = i;
  }
  if (!anchor) return trim(response);
  std::string out;
  // Keep anything on the heading line after the colon.
  const std::string& head = lines[*anchor];
  auto colon = head.find(':', lower(head).find("final blueprint"));
  if (colon != std::string::npos) {
    std::string rest = plain(head.substr(colon + 1));
    if (!rest.empty() && rest.front() != '(') out = rest + "\n";
  }
  for (std::size_t i = *anchor + 1; i < lines.size(); ++i) out += lines[i] + "\n";
  std::string t = trim(out);
  return t.empty() ? trim(response) : t;
}

std::vector<std::string> parse_censor(std::string_view response) {
  std::string t = trim(response);
  if (t == "NO_ISSUES") return {};
  std::vector<std::string> bullets;
  std::vector<std::string> plain_lines;
  for (const auto& line : lines_of(t)) {
    if (trim(line).empty()) continue;
    if (auto b = bullet_body(line)) {
      bullets.push_back(*b);
    } else if (!bullets.empty() && (line.front() == ' ' || line.front() == '\t')) {
      bullets.back() += " " + trim(line);
    } else {
      plain_lines.push_back(trim(line));
    }
  }
  if (!bullets.empty()) return bullets;
  if (!plain_lines.empty()) return plain_lines;
  return {t.empty() ? std::string("(empty censor response)") : t};
}

std::vector<std::string> section_items(std::string_view text, std::string_view heading) {
  auto lines = lines_of(text);
  const std::string needle = lower(heading);
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_heading(lines[i]) && lower(lines[i]).find(needle) != std::string::npos) start = i;
  }
  std::vector<std::string> items;
  if (!start) return items;
  // Inline content after the heading's colon counts as an item.
  {
    std::string p = plain(lines[*start]);
    auto colon = p.find(':');
    if (colon != std::string::npos && !trim(p.substr(colon + 1)).empty()) items.push_back(trim(p.substr(colon + 1)));
  }
  for (std::size_t i = *start + 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (is_heading(line)) break;
    if (trim(line).empty()) continue;
    if (auto b = bullet_body(line)) {
      items.push_back(*b);
    } else if (!items.empty()) {
      items.back() += " " + trim(line);
    } else {
      items.push_back(trim(line));
    }
  }
  items.erase(std::remove_if(items.begin(), items.end(), is_none_item), items.end());
  return items;
}

Severity classify_issue(std::string_view text) {
  std::string l = lower(text);
  if (l.find("fallacy") != std::string::npos) return Severity::fallacy;
  if (l.find("slip") != std::string::npos) return Severity::slip;
  return Severity::fallacy;
}

GradeReport parse_grade(std::string_view transcript) {
  // The last anchor followed closely by a number wins; later prose that
  // merely mentions "the final grade" is skipped.
  const std::string low = lower(transcript);
  static const std::regex number(R"((\d+))");
  std::size_t anchor = std::string::npos;
  std::string digits;
  for (auto pos = low.rfind("final grade"); pos != std::string::npos;
       pos = pos == 0 ? std::string::npos : low.rfind("final grade", pos - 1)) {
    std::string window(transcript.substr(pos + 11, 120));
    std::smatch m;
    if (std::regex_search(window, m, number)) {
      anchor = pos;
      digits = m[1].str();
      break;
    }
  }
  if (anchor == std::string::npos) throw GradeParseFailure("no score after a 'Final Grade' anchor");
  if (digits.size() > 2) throw GradeParseFailure("score out of range: " + digits);
  int score = std::stoi(digits);
  if (score > 7) throw GradeParseFailure("score out of range: " + digits);

  // Only look for issues/scaffolding before the final anchor.
  auto line_start = transcript.rfind('\n', anchor);
  std::string_view body = transcript.substr(0, line_start == std::string_view::npos ? 0 : line_start);
  std::vector<Issue> issues;
  for (auto& item : section_items(body, "areas for improvement")) {
    Severity sev = classify_issue(item);
    issues.push_back({std::move(item), sev});
  }
  auto scaffolding = section_items(body, "scaffolding");

  std::vector<std::string> notes;
  bool fallacy = std::any_of(issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::fallacy; });
  if (fallacy && score > 3) {
    notes.push_back("score " + std::to_string(score) + " capped to 3: fallacy present");
    score = 3;
  }
  if (score == 5) {
    notes.push_back("score 5 coerced to 4: 5 is not on the scale");
    score = 4;
  }
  if (score == 7 && !issues.empty()) {
    notes.push_back("score 7 coerced to 6: issues listed");
    score = 6;
  }
  return GradeReport::make(score, std::move(issues), std::move(scaffolding), std::string(transcript),
                           std::move(notes));
}

}  // namespace proofloop::dialectic
