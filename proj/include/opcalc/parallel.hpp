#pragma once

#include <cstddef>
#include <functional>

namespace opcalc {

/// Worker count: OPCALC_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is written by exactly one worker,
/// so results never depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace opcalc
