#pragma once

#include <functional>

namespace glasscav {

/// Worker count resolution: explicit value > 0 wins, then GLASSCAV_THREADS, then
/// hardware concurrency.
int resolve_threads(int requested);

/// Static-partition parallel loop over [0, count). Exceptions from the body are
/// collected and the first one rethrown after all workers join. Results must be
/// written to disjoint slots, which keeps outputs independent of the worker count.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace glasscav
