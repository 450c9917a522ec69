#pragma once

#include <cstddef>
#include <functional>

namespace papml {

// Worker threads used by parallel_for. 0 restores hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Runs f(i) for i in [0, n) on a static partition of contiguous chunks.
// Each index is visited exactly once by exactly one thread, so results are
// independent of the worker count as long as f writes only to slot i.
// min_per_thread caps the number of threads spawned for small n.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f,
                  std::size_t min_per_thread = 1);

}  // namespace papml
