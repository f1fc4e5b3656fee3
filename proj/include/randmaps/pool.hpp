#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace randmaps {

// Work-stealing over replicate indices via a shared atomic cursor. Each task
// writes to its own preallocated slot, so the aggregation is independent of
// scheduling order.
inline void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
    if (count <= 0) return;
    unsigned threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (static_cast<std::int64_t>(threads) > count)
        threads = static_cast<unsigned>(count);
    if (threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace randmaps
