#pragma once

#include <cstdint>
#include <functional>

namespace entlab {

/// Resolves a worker count: an explicit request > 0 wins, then the
/// ENTLAB_WORKERS environment variable, then hardware concurrency.
int resolve_workers(int requested);

/// Runs fn(i) for every i in [0, count) across `workers` threads.  Items are
/// claimed through a shared atomic counter; callers write results into slots
/// indexed by i, so output layout is independent of scheduling.  The first
/// exception thrown by any item is rethrown after all threads join.
void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace entlab
