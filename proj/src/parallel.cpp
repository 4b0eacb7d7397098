#include "segunc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace segunc {

unsigned worker_count()
{
    if (const char* env = std::getenv("SEGUNC_THREADS")) {
        try {
            const auto n = std::stoul(env);
            if (n > 0) {
                return static_cast<unsigned>(std::min<unsigned long>(n, 256));
            }
        } catch (const std::exception&) {
            // Ignore unparsable values.
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

void for_each_chunk(std::size_t n, std::size_t chunk,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn)
{
    chunk = std::max<std::size_t>(chunk, 1);
    const auto chunks = chunk_count(n, chunk);
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_count(), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            fn(c * chunk, std::min(n, (c + 1) * chunk), c);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            try {
                fn(c * chunk, std::min(n, (c + 1) * chunk), c);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = chunks;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 1; i < workers; ++i) {
        pool.emplace_back(work);
    }
    work();
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace segunc
