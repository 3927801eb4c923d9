#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wcsense::detail {

inline unsigned default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

// Calls f(begin, end) on contiguous chunks of [0, n). Chunk boundaries depend
// only on n and the thread count, and each chunk writes its own slots, so the
// result does not depend on scheduling.
template <typename F>
void parallel_chunks(std::size_t n, unsigned threads, F&& f) {
    const std::size_t workers = std::min<std::size_t>(threads, n);
    if (workers <= 1) {
        if (n > 0) f(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t end = begin + base + (w < extra ? 1 : 0);
        pool.emplace_back([&, w, begin, end] {
            try {
                f(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace wcsense::detail
