#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace proofloop::conjecture {

struct ParsedConjectures {
  std::vector<std::string> conjectures;
  std::vector<std::string> negations;
  std::string proof;

  // Canonical form: a single compact JSON object.
  std::string serialize() const;
  friend bool operator==(const ParsedConjectures&, const ParsedConjectures&) = default;
};

// Finds the conjecture JSON object in a parser reply, tolerating code fences
// and prose around it. Throws ParseError when no JSON object can be read and
// SchemaError on wrong shapes, unequal lengths or empty strings.
ParsedConjectures parse_conjectures(std::string_view raw);

// "Conjecture 2: x", "**Negation of Conjecture 1:** x" -> "x".
std::string strip_conjecture_header(std::string_view text);

// Phrases that suggest a statement leans on its parent proof.
std::vector<std::string> referential_phrases(std::string_view text);

}  // namespace proofloop::conjecture
