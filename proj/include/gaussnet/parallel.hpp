#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace gaussnet {

// Runs fn(0..n_tasks-1) on up to `workers` threads.  Tasks must be pure
// with respect to each other; callers reduce results afterwards in task
// order, which keeps every aggregate independent of scheduling.
inline void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
    if (n_tasks <= 0) return;
    if (workers <= 1 || n_tasks == 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    int n_threads = std::min(workers, n_tasks);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

// Worker count from the environment (GAUSSNET_WORKERS) or hardware.
int default_workers();

}  // namespace gaussnet
