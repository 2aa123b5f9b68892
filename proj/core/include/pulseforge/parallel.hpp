#pragma once

#include <cstddef>
#include <functional>

namespace pulseforge {

/// Worker count for sample-level parallelism: PULSEFORGE_THREADS when set to
/// a positive integer, otherwise std::thread::hardware_concurrency().
int worker_threads();

/// Runs body(i) for i in [0, count) on up to worker_threads() threads. The
/// first exception thrown (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pulseforge
