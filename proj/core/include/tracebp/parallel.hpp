#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace tracebp {

/// Runs fn(0..count-1) on up to `jobs` worker threads. Work items must be
/// independent; callers keep determinism by writing results into per-index
/// slots and reducing afterwards in index order.
template <typename F>
void parallel_for(int count, int jobs, F&& fn) {
    if (jobs > count)
        jobs = count;
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count)
                    return;
                fn(i);
            }
        });
    for (auto& t : workers)
        t.join();
}

} // namespace tracebp
