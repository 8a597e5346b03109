#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace wfsel {

// Index-parallel loop.  Work items must only write to their own slot;
// results are then independent of scheduling, so parallel and serial
// runs agree bit for bit.
template <class F>
void parallel_for(int n, F&& fn, unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 2) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace wfsel
