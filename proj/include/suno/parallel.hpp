#pragma once

#include <cstddef>
#include <functional>

namespace suno {

// Global worker count for parallel_for. 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n) across the configured worker count with
// static chunking. Nested calls from inside a worker run serially, so
// coarse-grained parallelism (over scans) wins over the candidate sweep.
// Results must be written to disjoint slots; reductions happen afterwards
// in index order, which keeps every pipeline output independent of the
// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace suno
