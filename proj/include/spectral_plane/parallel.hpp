#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace spectral_plane {

// Runs body(i) for i in [0, n). Work items must be independent and write
// only into caller-owned slots addressed by i, so the result is identical
// for every thread count. If bodies throw, the exception of the smallest
// work index is rethrown.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<int> error_index(threads, -1);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_index[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& worker : pool) worker.join();
    int first = -1;
    for (int w = 0; w < threads; ++w) {
        if (error_index[w] >= 0 && (first < 0 || error_index[w] < error_index[first]))
            first = w;
    }
    if (first >= 0) std::rethrow_exception(errors[first]);
}

} // namespace spectral_plane
