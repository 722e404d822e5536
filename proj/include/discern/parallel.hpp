#pragma once

#include <cstddef>
#include <functional>

namespace discern {

/// Worker count: DISCERN_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1). Read on every call so tests can pin it.
std::size_t thread_count();

/// Run fn over [begin, end) split into contiguous blocks, one per worker.
/// fn receives (block_begin, block_end) and must only write state owned by
/// its own indices; results are then identical for any worker count.
/// Runs inline when the range is small or a single worker is configured.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace discern
