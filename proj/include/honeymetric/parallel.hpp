#pragma once

// Chunked, seed-stable parallel execution. Work is cut into fixed-size
// chunks; chunk c always runs with a seed derived from (seed, c), so results
// depend on the chunk size but not on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace honeymetric {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for chunk c of a run seeded with `seed`.
inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) { return seed ^ splitmix64(chunk); }

struct ParallelOptions {
    std::size_t chunk_size = 10'000;
    unsigned threads = 0;  // 0 = hardware concurrency
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(chunk_index, begin, end) for every chunk of [0, total).
template <class Fn>
void for_each_chunk(std::size_t total, const ParallelOptions& opts, Fn&& fn) {
    const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
    const std::size_t chunks = (total + chunk - 1) / chunk;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(opts.threads), chunks));
    auto run = [&](std::size_t c) { fn(c, c * chunk, std::min(total, (c + 1) * chunk)); };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
                try {
                    run(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace honeymetric
