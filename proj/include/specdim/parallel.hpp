#pragma once

#include <cstddef>
#include <functional>

namespace specdim {

// Worker count: SPECDIM_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int thread_budget();

// Runs body(i) for every i in [0, n), splitting the range into contiguous
// blocks, one per worker. body must confine writes to per-index state; under
// that contract results do not depend on the schedule or the thread count.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace specdim
