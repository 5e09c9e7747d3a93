#pragma once

#include <cstddef>
#include <functional>

namespace polyx {

/// Worker count: POLYX_THREADS if set, else `requested` if > 0, else the
/// number of hardware threads.
std::size_t resolve_threads(std::size_t requested = 0);

/// Runs body(i) for i in [0, count) over `threads` workers using contiguous
/// blocks. The body must only write to slots owned by its index, so results
/// never depend on the worker count. The first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace polyx
