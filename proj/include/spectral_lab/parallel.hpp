#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace spectral_lab {

// Worker cap for every parallel loop in the library. 0 restores the default,
// which is SPECTRAL_LAB_THREADS when set and the hardware concurrency otherwise.
void set_thread_count(unsigned count);
unsigned thread_count();

// Runs body(i) for i in [0, n) over contiguous static chunks. Each index is
// visited exactly once and results written to per-index slots do not depend
// on scheduling. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spectral_lab
