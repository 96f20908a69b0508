#pragma once

#include <cstddef>
#include <functional>

namespace mcqmc {

// Worker count: hardware concurrency, capped by the MCQMC_THREADS environment
// variable when it is set to a positive integer.
std::size_t worker_count();

// Runs body(i) for i in [0, count). Tasks must be independent; results are
// written by index so the outcome does not depend on scheduling. The first
// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mcqmc
