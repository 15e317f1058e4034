#pragma once

#include <cstddef>
#include <functional>

namespace maxseq {

/// Worker count: `requested` if positive, else MAXSEQ_THREADS, else the
/// number of hardware threads (at least 1).
unsigned resolve_threads(int requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; callers write results into slot i so aggregation does
/// not depend on the schedule. If bodies throw, the exception from the
/// lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace maxseq
