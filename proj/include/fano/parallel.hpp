#pragma once

#include <cstddef>
#include <functional>

namespace fano {

// Resolve a worker-count request: 0 means "pick from hardware", anything else
// is used as given (clamped to at least 1).
unsigned resolve_workers(unsigned requested);

// Run fn over [0, n) split into one contiguous chunk per worker.  Chunks are
// disjoint, so writes to per-index output slots are race-free, and any
// reduction the caller performs over per-chunk partials in chunk order is
// bitwise deterministic regardless of scheduling.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t begin, std::size_t end,
                                           std::size_t chunk_index)>& fn);

}  // namespace fano
