#include "fano/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace fano {

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return std::max(1u, requested);
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp(hw, 1u, 8u);
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned w = std::min<std::size_t>(resolve_workers(workers), n);
    if (w <= 1) {
        fn(0, n, 0);
        return;
    }
    const std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (unsigned c = 0; c < w; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace fano
