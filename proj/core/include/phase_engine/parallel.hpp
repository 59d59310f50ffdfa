#pragma once

#include <cstddef>
#include <functional>

namespace phase_engine {

// Worker cap: PHASE_ENGINE_THREADS if set (>=1), else hardware concurrency.
int max_threads();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker, so writes to disjoint indices stay deterministic. fn must not
// accumulate into shared state; reductions belong to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace phase_engine
