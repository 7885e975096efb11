#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

// Deterministic fork-join loop for the parameter sweeps.
//
// The index range is split into contiguous chunks, one per worker, and the
// body must write its result to caller-owned slots keyed by the loop index,
// so the outcome is identical for every thread count.  The first exception
// raised by any worker is rethrown on the calling thread after all workers
// have joined.

namespace fracsign {

// Worker count: FRACSIGN_THREADS when set (clamped to [1, 256]), otherwise
// the hardware concurrency, otherwise 1.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("FRACSIGN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0') {
            if (v < 1) return 1;
            if (v > 256) return 256;
            return static_cast<unsigned>(v);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    if (count == 0) return;

    const std::size_t workers =
        std::min<std::size_t>(thread_budget(), count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::mutex mu;
    std::exception_ptr first_error;
    auto run_chunk = [&](std::size_t lo, std::size_t hi) {
        try {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(mu);
            if (!first_error) first_error = std::current_exception();
        }
    };

    const std::size_t base = count / workers;
    const std::size_t extra = count % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::size_t lo = 0;
    for (std::size_t c = 0; c < workers; ++c) {
        const std::size_t hi = lo + base + (c < extra ? 1 : 0);
        if (c + 1 == workers) {
            run_chunk(lo, hi); // caller thread takes the last chunk
        } else {
            pool.emplace_back(run_chunk, lo, hi);
        }
        lo = hi;
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace fracsign
