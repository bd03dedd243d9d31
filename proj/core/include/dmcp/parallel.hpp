#pragma once

#include <cstddef>
#include <functional>

namespace dmcp {

/// Worker count used when a caller passes 0.
unsigned default_thread_count() noexcept;

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Each index is visited exactly once; results written by index keep a
/// deterministic layout. The first exception thrown by any worker is
/// rethrown after all workers have joined.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace dmcp
