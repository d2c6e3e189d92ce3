#pragma once

#include <cstddef>
#include <functional>

namespace modspace {

/// Worker count: MODSPACE_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so writing to slot i of a pre-sized container is deterministic. The first
/// exception thrown by any body is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace modspace
