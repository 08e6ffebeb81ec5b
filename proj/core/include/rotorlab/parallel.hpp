#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rotorlab {

// Worker count: hardware concurrency capped by ROTORLAB_THREADS.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("ROTORLAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

// Runs f(chunk_index, begin, end) over fixed-size chunks of [0, n).
// Chunk boundaries depend only on chunk_size, never on the worker count,
// so per-chunk partial results can be merged deterministically.
template <typename F>
void parallel_chunks(std::size_t n, std::size_t chunk_size, F&& f) {
    if (n == 0) return;
    std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    int workers = worker_count();
    if (workers == 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            f(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            f(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min<std::size_t>(workers, n_chunks);
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

// Runs f(i) for i in [0, n), one item per task.
template <typename F>
void parallel_for_each(std::size_t n, F&& f) {
    parallel_chunks(n, 1, [&](std::size_t, std::size_t lo, std::size_t) { f(lo); });
}

} // namespace rotorlab
