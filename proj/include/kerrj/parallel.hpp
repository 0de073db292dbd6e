#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kerrj {

// KERRJ_THREADS if set and positive, otherwise hardware concurrency.
int default_workers();

// Runs fn(i) for i in [0, n) on a bounded pool. Results must be written to
// per-index slots, so the outcome is independent of the worker count.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers < 1) workers = 1;
    const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (nw <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace kerrj
