#pragma once

// Index-parallel loops for independent work items (sweep cells, GA fitness,
// Jacobian columns). Results are written by index, so output order never
// depends on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace cabledyn::parallel {

/// Worker count: the hardware concurrency (at least 1), capped by
/// CABLEDYN_THREADS when that is a positive integer.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CABLEDYN_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return std::min(hw, static_cast<unsigned>(std::min<long>(v, 1L << 16)));
        } catch (const std::exception&) {
        }
    }
    return hw;
}

/// Calls fn(i) for i in [0, n). The exception of the lowest failing index is
/// rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned workers = worker_count()) {
    if (n == 0) return;
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    std::vector<std::exception_ptr> errors(n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Maps fn over [0, n) into a vector ordered by index.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, unsigned workers = worker_count()) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, workers);
    return out;
}

}  // namespace cabledyn::parallel
