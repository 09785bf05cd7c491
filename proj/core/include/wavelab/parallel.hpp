#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace wavelab {

/// Runs fn(begin, end) over contiguous chunks of [0, count) on `threads`
/// worker threads. Chunk boundaries depend only on (count, threads) and each
/// chunk writes disjoint output, so results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t n = static_cast<std::size_t>(threads);
    const std::size_t chunk = (count + n - 1) / n;
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t b = i * chunk;
        if (b >= count) break;
        const std::size_t e = std::min(count, b + chunk);
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace wavelab
