#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pwdyn {

inline std::size_t default_jobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// fn(i) for i in [0, n) on up to `jobs` threads; results kept in index order.
template <class F>
auto parallel_map(std::size_t n, std::size_t jobs, F&& fn) -> std::vector<decltype(fn(std::size_t{0}))> {
    using T = decltype(fn(std::size_t{0}));
    std::vector<T> out(n);
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace pwdyn
