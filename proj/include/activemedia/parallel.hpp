#pragma once

#include <cstddef>
#include <functional>

namespace activemedia {

/// Worker count from ACTIVEMEDIA_WORKERS, else hardware concurrency (>= 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers finish.
/// Calls made from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace activemedia
