#pragma once

#include <cstddef>
#include <functional>

namespace fatpad {

/// Worker count used by parallel_for: FATPAD_THREADS when set, otherwise the
/// hardware concurrency.
unsigned default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Work is handed out in index order; if any call throws, the exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

}  // namespace fatpad
