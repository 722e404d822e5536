#include "discern/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace discern {

std::size_t thread_count() {
    if (const char* env = std::getenv("DISCERN_THREADS")) {
        int parsed = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), parsed);
        if (ec == std::errc() && *ptr == '\0' && parsed > 0)
            return static_cast<std::size_t>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (begin >= end) return;
    const std::size_t range = end - begin;
    const std::size_t workers = std::min(thread_count(), range);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }
    const std::size_t chunk = (range + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(lo + chunk, end);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace discern
