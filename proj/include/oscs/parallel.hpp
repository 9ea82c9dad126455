#pragma once

#include <functional>

namespace oscs {

// Worker count, read once from OSCS_THREADS (default 1).
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n). Work is split in contiguous blocks; bodies
// must write disjoint outputs, so results do not depend on the schedule.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace oscs
