#pragma once

#include <cstddef>
#include <functional>

namespace reeb {

// Worker count: REEB_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Calls fn(i) for i in [0, n) on up to worker_count() threads. fn must only
// write to slot i of its output. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace reeb
