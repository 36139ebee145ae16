// parallel.hpp: ordered worker pool for scans: items are computed on `jobs`
// threads and handed to the sink strictly in input order.

#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace pfwcl {

/// Worker count from PF_WCL_JOBS, defaulting to 1.
inline unsigned default_jobs() {
    if (const char* env = std::getenv("PF_WCL_JOBS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 1;
}

template <class Compute, class Sink>
void ordered_parallel_for(std::size_t count, unsigned jobs, Compute&& compute, Sink&& sink) {
    using Result = decltype(compute(std::size_t{}));
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) sink(i, compute(i));
        return;
    }
    std::vector<std::optional<Result>> results(count);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abandon{false};
    // the lowest failing index wins, so the emitted prefix matches a sequential run
    std::size_t fail_index = count;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || abandon) return;
            {
                std::lock_guard lock(mu);
                if (i > fail_index) return;
            }
            try {
                Result r = compute(i);
                std::lock_guard lock(mu);
                results[i] = std::move(r);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < fail_index) {
                    fail_index = i;
                    failure = std::current_exception();
                }
            }
            cv.notify_all();
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, count); ++t) pool.emplace_back(worker);

    try {
        for (std::size_t i = 0; i < count; ++i) {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return results[i].has_value() || fail_index <= i; });
            if (fail_index <= i) break;
            Result r = std::move(*results[i]);
            results[i].reset();
            lock.unlock();
            sink(i, std::move(r));
        }
    } catch (...) {
        abandon = true;
        throw;
    }
    abandon = true;
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace pfwcl
