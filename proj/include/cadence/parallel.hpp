#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace cadence {

// Worker count: explicit value if given, else CADENCE_THREADS, else 1.
int resolve_threads(std::optional<int> requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Callers write
// results into pre-sized slots so output order never depends on scheduling.
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace cadence
