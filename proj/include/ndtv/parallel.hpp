#pragma once

#include <cstddef>
#include <functional>

namespace ndtv {

// Worker cap: NDTV_THREADS when set (>= 1), else the hardware concurrency.
std::size_t max_threads();

// Runs f(i) for i in [0, count) across worker threads. Each index must write
// only to its own slot so results are independent of the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

}  // namespace ndtv
