#pragma once

#include <cstddef>
#include <functional>

namespace viscoctrl {

/// Process-wide worker count used by mode-parallel loops (default 1).
void set_worker_count(unsigned workers);
unsigned worker_count() noexcept;

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
/// results are then independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace viscoctrl
