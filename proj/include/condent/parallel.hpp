#pragma once
// Minimal static-chunked parallel loop. Work item i always runs fn(i) exactly
// once, so results written by index are identical for any thread count.

#include <cstddef>
#include <functional>

namespace condent {

// Thread count from CONDENT_THREADS, else hardware concurrency (at least 1).
int thread_count();

// Runs fn(i) for i in [0, n). The first exception thrown by any worker is
// rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace condent
