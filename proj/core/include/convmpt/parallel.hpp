#ifndef CONVMPT_PARALLEL_HPP
#define CONVMPT_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace convmpt {

/// Worker count used by parallel_for. Resolution order: value set through
/// set_max_threads, then the CONVMPT_THREADS environment variable, then
/// hardware concurrency. Always >= 1.
int max_threads();

/// Programmatic override (0 restores the environment/hardware default).
void set_max_threads(int n);

/// Runs fn(i) for i in [0, count), split into contiguous chunks across
/// worker threads. Each index is processed exactly once, so work that only
/// writes to per-index slots is deterministic regardless of thread count.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace convmpt

#endif  // CONVMPT_PARALLEL_HPP
