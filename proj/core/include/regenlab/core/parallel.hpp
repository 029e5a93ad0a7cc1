#pragma once

#include <cstddef>
#include <functional>

namespace regenlab::core {

// Worker budget: REGENLAB_THREADS if set and positive, else the hardware
// concurrency (at least 1).
int thread_budget();

// Runs task(i) for i in [0, n) on up to `threads` workers (0: budget).
// Tasks must write only to their own output slots; results are then
// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task, int threads = 0);

}  // namespace regenlab::core
