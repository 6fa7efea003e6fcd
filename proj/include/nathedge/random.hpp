#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace nathedge {

/// Generator tags; also mixed into every per-path stream so that two
/// generators sharing a seed never share random numbers.
enum class GeneratorKind { LeeCarter, CBD, Bootstrap };

/// Engine for one simulated path. The stream depends only on
/// (seed, generator, path index), never on scheduling.
inline std::mt19937_64 path_engine(std::uint64_t seed, GeneratorKind kind, std::size_t path) {
    const auto p = static_cast<std::uint64_t>(path);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(p),
                      static_cast<std::uint32_t>(p >> 32)};
    return std::mt19937_64(seq);
}

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to
/// `threads` workers. Chunks are disjoint, so callers writing only to their
/// own slots get results independent of the worker count.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    if (n == 0) return;
    const std::size_t workers = std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, n);
    if (workers == 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Default worker count for path-parallel loops.
inline unsigned default_threads() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace nathedge
