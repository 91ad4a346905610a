#pragma once

#include <cstddef>
#include <functional>

namespace tvpt {

/// Worker count used by the Monte Carlo and experiment drivers. Reads the
/// TVPT_THREADS environment variable (values < 1 are ignored); otherwise uses
/// the hardware concurrency.
std::size_t default_thread_count();

/// Overrides the thread count for the current process. 0 restores the default.
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count). Bodies must write only to slot i of
/// caller-owned storage; any reduction happens afterwards in index order, which
/// is what makes results independent of the number of threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace tvpt
