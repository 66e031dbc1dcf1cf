#include "proofloop/conjecture/parse.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>

#include <nlohmann/json.hpp>

#include "proofloop/core/errors.hpp"

using nlohmann::json;

namespace proofloop::conjecture {
namespace {

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// End index (inclusive) of the balanced {...} starting at `open`, honouring
// JSON string escapes; nullopt if it never closes.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

std::vector<std::string> string_array(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("conjecture JSON lacks '") + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw SchemaError(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw SchemaError(std::string("'") + key + "' must hold strings");
    std::string text = strip_conjecture_header(v.get<std::string>());
    if (text.empty()) throw SchemaError(std::string("empty entry in '") + key + "'");
    out.push_back(std::move(text));
  }
  return out;
}

}  // namespace

std::string strip_conjecture_header(std::string_view text) {
  static const std::regex header(
      R"(^\s*(?:\*\*)?\s*(?:negation(?:\s+of)?\s+)?(?:conjecture|negation)\s*(?:#\s*)?\d*\s*(?:\*\*)?\s*[:.)\-]\s*(?:\*\*)?\s*)",
      std::regex::icase);
  std::string s(text);
  std::smatch m;
  if (std::regex_search(s, m, header) && m.position(0) == 0) s = s.substr(m.length(0));
  return trimmed(s);
}

std::string ParsedConjectures::serialize() const {
  return json{{"conjectures", conjectures}, {"negations", negations}, {"proof", proof}}.dump();
}

ParsedConjectures parse_conjectures(std::string_view raw) {
  std::optional<json> found;
  std::string last_error = "no JSON object found";
  for (std::size_t open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    auto close = balanced_end(raw, open);
    if (!close) continue;
    try {
      json j = json::parse(raw.substr(open, *close - open + 1));
      if (j.is_object() && (j.contains("conjectures") || j.contains("negations"))) {
        found = std::move(j);
        break;
      }
    } catch (const json::exception& e) {
      last_error = e.what();
    }
  }
  if (!found) throw ParseError("conjecture parser reply: " + last_error);

  ParsedConjectures out;
  out.conjectures = string_array(*found, "conjectures");
  out.negations = string_array(*found, "negations");
  if (out.conjectures.size() != out.negations.size()) {
    throw SchemaError("conjectures and negations differ in length (" + std::to_string(out.conjectures.size()) +
                      " vs " + std::to_string(out.negations.size()) + ")");
  }
  if (found->contains("proof")) {
    if (!found->at("proof").is_string()) throw SchemaError("'proof' must be a string");
    out.proof = trimmed(found->at("proof").get<std::string>());
  }
  if (!out.conjectures.empty() && out.proof.empty()) throw SchemaError("empty 'proof' alongside conjectures");
  return out;
}

std::vector<std::string> referential_phrases(std::string_view text) {
  static const char* const kPhrases[] = {"as above",       "the above",         "defined above",
                                         "defined earlier", "previously defined", "from the proof",
                                         "the set s from", "in the previous",    "from the original",
                                         "mentioned above", "as before",          "the same as before"};
  std::string low(text);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  std::vector<std::string> out;
  for (const char* p : kPhrases) {
    if (low.find(p) != std::string::npos) out.emplace_back(p);
  }
  return out;
}

}  // namespace proofloop::conjecture
