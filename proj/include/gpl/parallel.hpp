#pragma once

#include <cstddef>
#include <functional>

namespace gpl {

// Worker count: hardware concurrency, capped by the GPL_THREADS environment
// variable when it holds a positive integer.
unsigned worker_count();

// Runs task(i) for i in [0, n) on up to worker_count() threads. Tasks must
// write only to their own slots. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace gpl
