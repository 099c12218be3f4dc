#pragma once

#include <functional>

namespace scatterkit {

/// Worker count: `requested` when positive, else SCATTERKIT_JOBS, else the
/// hardware concurrency (at least 1).
int resolve_jobs(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception by index is rethrown after all workers finish.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace scatterkit
