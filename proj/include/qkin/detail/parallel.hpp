#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace qkin {

// Process-wide worker count for embarrassingly parallel loops (Langevin
// walkers). Results are bit-identical for any value because all randomness
// is counter-based.
void set_worker_threads(int n);
int worker_threads();

namespace detail {

template <typename Fn>
void parallel_chunks(int begin, int end, Fn&& fn) {
    const int nt = std::max(1, worker_threads());
    const int total = end - begin;
    if (nt == 1 || total < 2 * nt) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const int chunk = (total + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const int lo = begin + t * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn]() { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace qkin
