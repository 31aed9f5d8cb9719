#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

#include "chern/workers.hpp"

namespace chern::detail {

// Calls body(i) for i in [0, count) across the worker pool. Results must be
// written to per-index slots; reductions happen afterwards in index order. If
// any call throws, the exception from the smallest failing index is rethrown.
// Calls made from inside a worker run serially.
inline thread_local bool inside_worker = false;

template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const auto workers = static_cast<std::size_t>(worker_count());
    if (workers <= 1 || count < 2 || inside_worker) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t pool = std::min(workers, count);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_fail{std::numeric_limits<std::size_t>::max()};
    std::vector<std::size_t> fail_index(pool, std::numeric_limits<std::size_t>::max());
    std::vector<std::exception_ptr> fail(pool);
    {
        std::vector<std::jthread> threads;
        threads.reserve(pool);
        for (std::size_t w = 0; w < pool; ++w) {
            threads.emplace_back([&, w] {
                inside_worker = true;
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count || i > first_fail.load()) return;
                    try {
                        body(i);
                    } catch (...) {
                        fail_index[w] = i;
                        fail[w] = std::current_exception();
                        std::size_t seen = first_fail.load();
                        while (i < seen && !first_fail.compare_exchange_weak(seen, i)) {
                        }
                        return;
                    }
                }
            });
        }
    }
    std::size_t best = pool;
    for (std::size_t w = 0; w < pool; ++w) {
        if (fail[w] && (best == pool || fail_index[w] < fail_index[best])) best = w;
    }
    if (best != pool) std::rethrow_exception(fail[best]);
}

}  // namespace chern::detail
