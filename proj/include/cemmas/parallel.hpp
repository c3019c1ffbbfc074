#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace cemmas {

// Static block partition of [begin, end) over up to `threads` workers. The
// callback receives (index, worker); workers own disjoint index ranges and
// must write only to per-index or per-worker slots, which keeps results
// independent of the worker count. The first exception thrown is rethrown.
inline void parallel_for(long long begin, long long end, int threads,
                         const std::function<void(long long, int)>& fn) {
    const long long count = end - begin;
    if (count <= 0) return;
    const int workers = static_cast<int>(std::max<long long>(
        1, std::min<long long>(threads, count)));
    if (workers == 1) {
        for (long long i = begin; i < end; ++i) fn(i, 0);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const long long chunk = (count + workers - 1) / workers;
    auto work = [&](int w) {
        const long long lo = begin + w * chunk;
        const long long hi = std::min(end, lo + chunk);
        try {
            for (long long i = lo; i < hi; ++i) fn(i, w);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace cemmas
