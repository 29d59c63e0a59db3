#pragma once

#include <cstdint>
#include <functional>

namespace supersde {

/// Global worker count for block-parallel loops (default: hardware threads).
void set_thread_count(int n);
int thread_count();

/// Runs fn(block_index) for block_index in [0, n_blocks), distributing blocks
/// over workers. Each block is processed by exactly one thread and any
/// cross-block reduction is left to the caller, done in block order, so
/// results are bit-identical regardless of the worker count.
void parallel_blocks(std::int64_t n_blocks,
                     const std::function<void(std::int64_t)>& fn);

}  // namespace supersde
