#pragma once

#include <cstddef>
#include <functional>

namespace nullwave {

/// Worker cap: NULLWAVE_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_limit();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; fn must not share mutable state across indices.
/// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = thread_limit());

}  // namespace nullwave
