#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace proofloop {

// Runs fn(0..n-1) on up to max_workers threads (inline when max_workers <= 1
// or n <= 1). Never throws on behalf of fn: slot i of the result holds the
// exception fn(i) raised, or null.
std::vector<std::exception_ptr> parallel_for(std::size_t n, int max_workers,
                                             const std::function<void(std::size_t)>& fn);

// Rethrows the first captured exception, if any.
void rethrow_first(const std::vector<std::exception_ptr>& errors);

}  // namespace proofloop
