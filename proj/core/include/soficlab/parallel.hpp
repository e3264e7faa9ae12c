// Deterministic chunked parallelism: work is split into a fixed list of
// chunks independent of thread count, and results are merged in chunk order,
// so output is bit-identical for any --threads setting.

#pragma once

#include <cstddef>
#include <functional>

namespace sofic {

void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(chunk) for chunk = 0..n_chunks-1, possibly concurrently.
// fn must only touch per-chunk state; merge afterwards in chunk order.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

} // namespace sofic
