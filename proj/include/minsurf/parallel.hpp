#pragma once

#include <cstddef>
#include <functional>

namespace minsurf {

/// Worker count: MINSURF_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n) over static contiguous chunks. Each index is
/// visited exactly once, so results written to slot i are deterministic.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace minsurf
