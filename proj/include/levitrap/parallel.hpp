#pragma once

// Minimal fork-join helpers. Work is split into a fixed number of chunks that does not
// depend on the worker count, so reductions are bitwise reproducible across runs.

#include <cstddef>
#include <functional>

namespace levitrap {

/// Process-wide worker count (>= 1). Defaults to the hardware concurrency.
int worker_count();
void set_worker_count(int n);

/// Calls fn(begin, end) over [0, n) in contiguous chunks, possibly concurrently.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Sum of fn(begin, end) over the fixed chunking; partial sums combined in chunk order.
double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& fn);

}  // namespace levitrap
