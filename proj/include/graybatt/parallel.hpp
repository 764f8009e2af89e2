#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace graybatt {

// Runs fn(i) for i in [0, n) across up to `threads` workers (0 = hardware
// concurrency). Work items must be independent; the first exception, if any,
// is rethrown on the caller after all workers join.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned want = threads == 0 ? std::thread::hardware_concurrency() : threads;
    want = std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(n)));
    if (want == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(want);
    for (unsigned t = 0; t < want; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += want) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace graybatt
