#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace warpedheat::parallel {

// Worker count: WARPEDHEAT_THREADS if set and positive, else the hardware
// concurrency, else 1.
inline int thread_count() {
    if (const char* s = std::getenv("WARPEDHEAT_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Evaluates f(i) for i in [0, n) across the pool and gathers the results in
// input order, so concurrent runs are bit-identical to serial ones.  The
// first exception thrown by any task is rethrown after all workers join.
template <class T, class F>
std::vector<T> map_indexed(int n, F f) {
    std::vector<T> out(static_cast<size_t>(n > 0 ? n : 0));
    int workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                if (failed.load()) return;
                try {
                    out[i] = f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!failed.exchange(true))
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return out;
}

}  // namespace warpedheat::parallel
