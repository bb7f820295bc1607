#pragma once

#include <cstddef>
#include <functional>

namespace ghft {

/// Worker count from GHFT_THREADS (default 1, clamped to >= 1).
int thread_count();

/// Calls fn(i) for i in [0, n), split into contiguous chunks over
/// thread_count() threads.  fn must only write to disjoint per-i slots.
/// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ghft
