#pragma once

#include <cstddef>
#include <functional>

namespace volterra {

// 0 means std::thread::hardware_concurrency (at least 1).
std::size_t resolve_threads(std::size_t requested);

// Calls fn(i) for i in [0, count) on up to `threads` workers, static round-robin
// assignment. Callers write into per-index slots and reduce in index order, so
// results do not depend on the thread count. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace volterra
