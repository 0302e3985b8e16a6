#pragma once

#include <cstddef>
#include <functional>

namespace ldplab {

/// Thread count from LDPLAB_THREADS, else the hardware concurrency.
std::size_t default_thread_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers, each worker
/// taking a contiguous block of indices. Results must be written by index;
/// the first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ldplab
