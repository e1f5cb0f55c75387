#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace slicsim {

// Evaluates fn(i) for i in [0, count) on up to n_threads workers, storing
// results by index so the output ordering never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(size_t count, const std::function<T(size_t)>& fn,
                            unsigned n_threads = 1) {
    std::vector<T> out(count);
    if (count == 0) return out;
    n_threads = std::max(1u, std::min<unsigned>(n_threads, count));
    if (n_threads == 1) {
        for (size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace slicsim
