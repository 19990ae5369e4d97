#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace resetlab::detail {

inline unsigned resolve_workers(unsigned requested, std::size_t tasks) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, tasks)));
}

/// Runs fn(i) for i in [0, count). Tasks are claimed dynamically, so fn must
/// only write to per-index state. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    const unsigned n = resolve_workers(workers, count);
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
}

}  // namespace resetlab::detail
