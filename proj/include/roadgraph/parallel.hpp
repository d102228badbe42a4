#pragma once

#include <cstddef>
#include <functional>

namespace roadgraph {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Work is pulled dynamically; if any call throws, the exception
/// from the lowest failing index is rethrown after all workers stop.
void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

int resolveThreadCount(int requested);

}  // namespace roadgraph
