#pragma once

// Data-parallel map/reduce over index ranges. Maps write disjoint outputs and
// are bit-identical for any thread count. Reductions accumulate fixed-size
// chunks in index order when exec().deterministic is set (thread-count
// independent); otherwise per-thread partials are combined in thread order.

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace bracketforge {

struct ExecConfig {
    int threads = 1;
    bool deterministic = true;
};

inline ExecConfig& exec() {
    static ExecConfig cfg;
    return cfg;
}

// fn(begin, end) over [0, n) split into contiguous ranges.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int threads = exec().threads;
    if (threads <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    const std::size_t nt = static_cast<std::size_t>(threads);
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        if (b >= n) break;
        const std::size_t e = std::min(n, b + chunk);
        pool.emplace_back(fn, b, e);
    }
    for (auto& th : pool) th.join();
}

// Sum of fn(i) over [0, n).
inline double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
    if (exec().deterministic) {
        // Fixed 4096-element chunks combined in order: result does not depend
        // on the thread count.
        constexpr std::size_t kChunk = 4096;
        const std::size_t chunks = (n + kChunk - 1) / kChunk;
        std::vector<double> partial(chunks, 0.0);
        parallel_for(chunks, [&](std::size_t cb, std::size_t ce) {
            for (std::size_t c = cb; c < ce; ++c) {
                double s = 0.0;
                const std::size_t end = std::min(n, (c + 1) * kChunk);
                for (std::size_t i = c * kChunk; i < end; ++i) s += fn(i);
                partial[c] = s;
            }
        });
        double total = 0.0;
        for (double p : partial) total += p;
        return total;
    }
    const int threads = std::max(1, exec().threads);
    std::vector<double> partial(static_cast<std::size_t>(threads), 0.0);
    const std::size_t chunk = (n + threads - 1) / threads;
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) s += fn(i);
        partial[b / chunk] += s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace bracketforge
