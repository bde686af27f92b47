#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace selfsim::detail {

// Worker count: explicit request, else SELFSIM_THREADS, else hardware.
inline unsigned worker_count(unsigned requested = 0)
{
    unsigned n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("SELFSIM_THREADS")) {
            n = unsigned(std::max(1, std::atoi(env)));
        } else {
            n = std::max(1u, std::thread::hardware_concurrency());
        }
    }
    return n;
}

// Runs body(worker, begin, end) on contiguous chunks of [0, count); one chunk
// per worker so per-worker results can be reduced in a fixed order.
template <typename Body>
void parallel_chunks(std::size_t count, unsigned workers, Body&& body)
{
    workers = unsigned(std::max<std::size_t>(1, std::min<std::size_t>(workers, count)));
    if (workers == 1) {
        body(0u, std::size_t(0), count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        pool.emplace_back([&body, w, begin, end] { body(w, begin, end); });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace selfsim::detail
