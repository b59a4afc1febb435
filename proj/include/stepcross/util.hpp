#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace stepcross {

// Pairwise (cascade) summation. Deterministic for a fixed input order and
// much better conditioned than a running sum on long quadrature vectors.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// 17 significant digits: round-trips any double, byte-stable across runs.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Process-wide cap on worker threads (CLI --threads). 0 = hardware default.
inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}

inline unsigned effective_threads() {
    unsigned cap = thread_cap().load();
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return cap == 0 ? hw : std::min(cap, hw);
}

// Runs fn(i) for i in [0, count). Work units are independent; any shared
// output must be indexed by i so the result is identical for every thread
// count (reductions happen at the call site, in index order).
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(effective_threads(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stepcross
