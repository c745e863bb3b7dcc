#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace qcm {

// Runs fn(i) for every i in [0, n) on at most `threads` workers (0 = one per
// hardware thread). Failures are returned per index instead of aborting the
// other tasks. Each index is processed by exactly one worker.
inline std::vector<std::exception_ptr> parallel_for(std::size_t n, unsigned threads,
                                                    const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    if (n == 0) return errors;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(threads, n));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
        return errors;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return errors;
}

// Rethrows the first failure, in index order.
inline void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace qcm
