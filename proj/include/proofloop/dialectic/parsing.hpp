#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proofloop/core/types.hpp"

namespace proofloop::dialectic {

// Text after the last "Final Blueprint" heading line, or the whole response
// when there is none. Surrounding whitespace is trimmed.
std::string extract_proof_text(std::string_view response);

// Empty iff the trimmed response is exactly NO_ISSUES. Bullet lines become
// one issue each; without bullets every non-empty line is an issue.
std::vector<std::string> parse_censor(std::string_view response);

// Items of the section whose heading contains `heading` (case-insensitive),
// up to the next heading line. "None"-style items are dropped.
std::vector<std::string> section_items(std::string_view text, std::string_view heading);

// Classifies an issue line: "fallacy" wins over "slip"; untagged is fallacy.
Severity classify_issue(std::string_view text);

// Parses a grader transcript into a valid GradeReport. The score is the
// first integer after the last "Final Grade" anchor. Rubric violations are
// coerced (fallacy caps at 3, then 5 -> 4, then 7 with issues -> 6) and
// each coercion is noted. Throws GradeParseFailure without a usable score.
GradeReport parse_grade(std::string_view transcript);

std::string trim(std::string_view s);

}  // namespace proofloop::dialectic
