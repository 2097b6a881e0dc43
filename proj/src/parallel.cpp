#include "levitrap/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace levitrap {

namespace {

constexpr std::size_t kChunks = 64;

std::atomic<int>& workers_ref() {
    static std::atomic<int> n{std::max(1, static_cast<int>(std::thread::hardware_concurrency()))};
    return n;
}

void run_chunks(std::size_t n, const std::function<void(std::size_t)>& chunk_fn) {
    const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
    const int w = std::min<int>(worker_count(), static_cast<int>(chunks));
    if (w <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) chunk_fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) chunk_fn(c);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w - 1));
    for (int t = 1; t < w; ++t) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
}

}  // namespace

int worker_count() { return workers_ref().load(); }

void set_worker_count(int n) { workers_ref() = std::max(1, n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t chunks = std::min(kChunks, n);
    run_chunks(n, [&](std::size_t c) {
        if (c >= chunks) return;
        fn(n * c / chunks, n * (c + 1) / chunks);
    });
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& fn) {
    if (n == 0) return 0.0;
    const std::size_t chunks = std::min(kChunks, n);
    std::vector<double> partial(chunks, 0.0);
    run_chunks(n, [&](std::size_t c) {
        if (c >= chunks) return;
        partial[c] = fn(n * c / chunks, n * (c + 1) / chunks);
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace levitrap
