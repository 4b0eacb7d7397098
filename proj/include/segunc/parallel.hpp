#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>

namespace segunc {

// Worker count: SEGUNC_THREADS if set and positive, else hardware concurrency.
[[nodiscard]] unsigned worker_count();

inline constexpr std::size_t kDefaultChunk = 1U << 16U;

// Splits [0, n) into fixed-size chunks and runs fn(begin, end, chunk_index) on a
// pool of worker_count() threads. Chunk boundaries do not depend on the thread
// count, so per-chunk results reduced in chunk order are reproducible.
void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

[[nodiscard]] inline std::size_t chunk_count(std::size_t n, std::size_t chunk)
{
    return n == 0 ? 0 : (n + chunk - 1) / chunk;
}

} // namespace segunc
