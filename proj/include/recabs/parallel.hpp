#pragma once

#include <functional>

namespace recabs {

/// Worker count from the RECABS_WORKERS environment variable, falling back
/// to the hardware concurrency. Always at least 1.
int default_worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = default).
/// Callers write results into preallocated slots and reduce in index order,
/// so outputs never depend on the worker count. The first exception thrown
/// by any item is rethrown after all threads join.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace recabs
