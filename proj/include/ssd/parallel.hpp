#pragma once

#include <cstddef>
#include <functional>

namespace ssd {

// Runs fn(0) .. fn(count - 1) on up to `threads` workers (0 = hardware
// concurrency). Work items must write to disjoint outputs. The exception of
// the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ssd
