#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qcorr {

// Worker cap: QCORR_THREADS if set (must be >= 1), else hardware concurrency.
inline int max_threads() {
    if (const char* env = std::getenv("QCORR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs f(i) for i in [0, n). Tasks must be independent and write only to
// per-index slots, so the result cannot depend on the schedule.
template <typename F>
void parallel_for(int n, F&& f) {
    const int workers = std::min(max_threads(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace qcorr
