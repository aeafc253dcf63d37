#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace eegsz {

/// Process-wide worker cap (the CLI's --threads flag lands here).
void set_thread_cap(size_t n);
size_t thread_cap();

/// Runs fn(0..n-1) across up to thread_cap() workers. Each index must write
/// only to its own output slot; ordering across indices is unspecified.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn);

namespace detail {
inline std::atomic<size_t>& cap_storage() {
    static std::atomic<size_t> cap{0};  // 0 = use hardware concurrency
    return cap;
}
} // namespace detail

inline void set_thread_cap(size_t n) { detail::cap_storage().store(n); }

inline size_t thread_cap() {
    const size_t cap = detail::cap_storage().load();
    if (cap > 0) return cap;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    const size_t workers = std::min(n, thread_cap());
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace eegsz
