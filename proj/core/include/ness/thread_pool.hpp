#pragma once

#include <cstddef>
#include <functional>

namespace ness {

/// Hardware concurrency, capped by NESS_CHAIN_THREADS when it is set to a positive integer.
std::size_t default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default_thread_count()).
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace ness
