#ifndef OMW_PARALLEL_HPP
#define OMW_PARALLEL_HPP

#include <algorithm>
#include <thread>
#include <vector>

namespace omw {

// Runs fn(i) for i in [0, n). With threads > 1 the indices are split into
// contiguous chunks; callers own any output ordering (write by index).
template <typename Fn>
void parallel_for_indexed(int n, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int lo = static_cast<int>(static_cast<long>(n) * t / threads);
        const int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / threads);
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace omw

#endif
