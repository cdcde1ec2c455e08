#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace ccc {

/// Worker count for per-point certification work: the CERTIFY_THREADS
/// environment variable when set (clamped to [1, 256]), otherwise the
/// hardware concurrency.  Results never depend on this value — per-point
/// outputs are written to per-index slots and reduced in index order.
inline int certify_thread_count() {
    if (const char* env = std::getenv("CERTIFY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v > 256 ? 256 : v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

namespace detail {

/// Runs fn(i) for every i in [0, count) on up to `threads` OS threads.
/// fn must only write state owned by index i.  If any calls throw, the
/// exception with the lowest index is rethrown after all threads join, so
/// failure behaviour matches the sequential order.
template <class F>
inline void parallel_for_index(std::size_t count, int threads, F&& fn) {
    if (count == 0) return;
    if (threads > static_cast<int>(count)) threads = static_cast<int>(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail
}  // namespace ccc
