#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stimrec {

// Runs fn(0..n_items-1) across up to n_threads workers.  Items are claimed
// from a shared counter, so scheduling never affects what any item computes;
// callers must write results into per-index slots.  The first exception wins
// and is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n_items, std::size_t n_threads, Fn&& fn) {
    if (n_items == 0) return;
    if (n_threads <= 1 || n_items == 1) {
        for (std::size_t i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_items) return;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> workers;
    const std::size_t count = std::min(n_threads, n_items);
    workers.reserve(count);
    for (std::size_t i = 0; i < count; ++i) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stimrec
