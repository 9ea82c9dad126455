#include "oscs/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oscs {

namespace {
std::atomic<int>& threads_setting() {
    static std::atomic<int> n = [] {
        const char* env = std::getenv("OSCS_THREADS");
        int v = env ? std::atoi(env) : 1;
        return v > 0 ? v : 1;
    }();
    return n;
}
}  // namespace

int thread_count() { return threads_setting().load(); }
void set_thread_count(int n) { threads_setting().store(std::max(1, n)); }

void parallel_for(int n, const std::function<void(int)>& body) {
    const int nt = std::min(thread_count(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int w = 0; w < nt; ++w) {
        const int lo = static_cast<int>(static_cast<long>(n) * w / nt);
        const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / nt);
        pool.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace oscs
