#pragma once

#include <cstddef>
#include <functional>

namespace cloudscope {

/// Worker count: CLOUDSCOPE_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned thread_limit();

/// Runs body(i) for i in [0, n) on up to thread_limit() threads. If any call
/// throws, the exception from the lowest index is rethrown after all workers
/// finish, so failures are reported deterministically.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace cloudscope
