#pragma once

#include <string>
#include <string_view>

namespace proofloop {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// First 16 hex chars of sha256_hex; enough to tell texts apart in traces.
std::string short_digest(std::string_view data);

}  // namespace proofloop
