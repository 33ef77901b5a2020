#pragma once

#include <cstddef>
#include <functional>

namespace nhse {

// Worker cap for parallel_for. Defaults to NHSE_THREADS when set, else the
// hardware concurrency. Values < 1 reset to the default.
void set_thread_count(int n);
int thread_count();

// Calls fn(i) for i in [0, n). Each index runs exactly once; callers write
// only to slot i so results do not depend on scheduling. The first exception
// thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nhse
