#pragma once

#include <functional>

namespace eulerlab {

// Worker cap: EULER_LAB_THREADS if set (>= 1), otherwise the hardware
// concurrency. Read once per process.
int worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads in contiguous
// chunks. Callers must only perform disjoint writes so the result is
// identical for any worker count; reductions stay sequential elsewhere.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace eulerlab
