#pragma once
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace rmtlab {

/// Thread count resolution: explicit request > RMTLAB_THREADS > hardware.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RMTLAB_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run body(i) for i in [0, count) across `threads` workers. Work is claimed
/// from a shared atomic counter; results must be written into pre-sized,
/// index-addressed storage so the outcome is identical for any thread count.
template <typename Body>
void parallel_for(int count, int threads, Body&& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace rmtlab
