#pragma once

#include <cstddef>
#include <functional>

namespace spread {

/// Caps the worker count used by parallel_for. 0 restores the hardware default.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(i) for i in [0, count). Iterations must be independent; each
/// writes only to its own output slot, so results do not depend on the
/// number of workers. The first exception thrown by any body is rethrown.
/// Nested calls from inside a worker run serially on that worker.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace spread
