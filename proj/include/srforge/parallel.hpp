#pragma once

#include <cstddef>
#include <functional>

namespace srforge {

/// Worker cap: SRFORGE_THREADS when set to a positive integer, else the hardware concurrency.
int worker_threads();

/// Runs fn(i) for i in [0, n) on up to worker_threads() threads. Each index runs exactly once;
/// the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace srforge
