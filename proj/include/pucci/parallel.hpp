#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace pucci {

/// Worker count from PUCCI_THREADS, else the hardware concurrency; at least 1.
inline unsigned worker_count() {
    if (const char* env = std::getenv("PUCCI_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Applies f to 0..n−1 on a bounded pool; results keep index order.
///
/// The first exception thrown by any item is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, F f, unsigned workers = worker_count()) {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned k = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (k <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(k);
        for (unsigned i = 0; i < k; ++i) pool.emplace_back(work);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace pucci
