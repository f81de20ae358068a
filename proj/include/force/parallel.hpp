#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace force {

// Process-wide worker cap. 0 means "use hardware_concurrency".
inline std::atomic<unsigned>& detail_thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}

inline void set_max_threads(unsigned n) { detail_thread_cap().store(n); }

inline unsigned max_threads() {
    unsigned cap = detail_thread_cap().load();
    if (cap != 0) return cap;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs work(i) for i in [0, count). Each index is claimed atomically by one
// worker, so outputs must be disjoint per index. Results are bit-identical
// for any thread count as long as work(i) only writes to its own slice.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& work) {
    if (count == 0) return;
    unsigned n_threads = max_threads();
    if (n_threads > count) n_threads = static_cast<unsigned>(count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            work(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

} // namespace force
