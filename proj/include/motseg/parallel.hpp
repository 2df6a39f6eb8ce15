#pragma once

#include <thread>
#include <vector>

namespace motseg {

// Static-partition parallel loop. Each index is handled by exactly one
// worker determined by the partition alone, and workers only write to their
// own output slots, so results are identical at any thread count.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        const int begin = static_cast<int>(static_cast<long long>(n) * t / workers);
        const int end = static_cast<int>(static_cast<long long>(n) * (t + 1) / workers);
        pool.emplace_back([begin, end, &fn] {
            for (int i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace motseg
