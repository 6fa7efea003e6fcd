#include "nathedge/bootstrap.hpp"

#include <cmath>
#include <random>

#include "nathedge/error.hpp"

namespace nathedge {

ReductionMatrix reduction_matrix(const MortalityTable& table) {
    if (table.n_years() < 2) {
        throw Error(Errc::TooFewYears, "reduction rates need at least two years");
    }
    ReductionMatrix out;
    out.ages = table.ages();
    out.years = IntRange{table.years().lo, table.years().hi - 1};
    const std::size_t cols = table.n_years() - 1;
    out.r.resize(table.n_ages() * cols);
    for (std::size_t a = 0; a < table.n_ages(); ++a) {
        for (std::size_t t = 0; t < cols; ++t) {
            out.r[a * cols + t] = table.at(a, t + 1) / table.at(a, t);
        }
    }
    return out;
}

std::size_t bootstrap_block_count(const MortalityTable& table) {
    if (table.n_years() < 3) {
        throw Error(Errc::TooFewYears, "block bootstrap needs at least three years");
    }
    return table.n_years() - 2;
}

std::vector<std::size_t> bootstrap_block_draws(std::size_t n_candidates, int n_blocks,
                                               std::uint64_t seed, std::size_t path) {
    auto eng = path_engine(seed, GeneratorKind::Bootstrap, path);
    std::uniform_int_distribution<std::size_t> pick(0, n_candidates - 1);
    std::vector<std::size_t> draws(static_cast<std::size_t>(n_blocks));
    for (auto& d : draws) d = pick(eng);
    return draws;
}

ScenarioSet simulate_bootstrap(const MortalityTable& table, int n_blocks, std::size_t n_paths,
                               std::uint64_t seed, unsigned threads) {
    const std::size_t n_candidates = bootstrap_block_count(table);
    if (n_blocks < 1) throw Error(Errc::HorizonExceeded, "need at least one block");
    if (n_paths < 1) throw Error(Errc::EmptySample, "need at least one path");
    const ReductionMatrix red = reduction_matrix(table);
    const std::size_t n_ages = table.n_ages();
    const std::size_t last = table.n_years() - 1;
    const auto h = static_cast<std::size_t>(2 * n_blocks);

    std::vector<double> q(n_paths * n_ages * h);
    parallel_for(n_paths, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            const auto draws = bootstrap_block_draws(n_candidates, n_blocks, seed, n);
            for (std::size_t a = 0; a < n_ages; ++a) {
                double m = table.at(a, last);
                std::size_t s = 0;
                for (std::size_t blk : draws) {
                    // Block k holds reduction columns k and k + 1.
                    for (std::size_t c = blk; c <= blk + 1; ++c, ++s) {
                        m *= red.at(a, c);
                        q[(n * n_ages + a) * h + s] = -std::expm1(-m);
                    }
                }
            }
        }
    });
    return ScenarioSet(GeneratorKind::Bootstrap, seed, table.years().hi, table.ages(),
                       static_cast<int>(h), n_paths, std::move(q));
}

}  // namespace nathedge
