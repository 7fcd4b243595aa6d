//==============================================================================
// Minimal deterministic parallel-for over index ranges.  Workers write to
// disjoint slots; reductions happen serially afterwards, so results are
// bit-identical for any worker count.  POSDIV_THREADS caps the worker count.
//==============================================================================
#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace posdiv {

inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw ? (int)hw : 1;
    if (const char* env = std::getenv("POSDIV_THREADS")) {
        const int req = std::atoi(env);
        if (req >= 1) n = req;
    }
    return std::max(1, n);
}

template <typename F>
void parallel_for(int begin, int end, F&& body) {
    const int n = end - begin;
    if (n <= 0) return;
    const int workers = std::min(worker_count(), n);
    if (workers == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + w * chunk;
        const int hi = std::min(lo + chunk, end);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace posdiv
