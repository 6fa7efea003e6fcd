#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nathedge/mortality_table.hpp"
#include "nathedge/scenario.hpp"

namespace nathedge {

/// Year-on-year mortality reduction rates r(x, t) = m(x, t+1) / m(x, t).
struct ReductionMatrix {
    IntRange ages;
    IntRange years;  // first column is years.lo, one fewer than the source table
    std::vector<double> r;  // [age][column]

    std::size_t n_ages() const noexcept { return static_cast<std::size_t>(ages.size()); }
    std::size_t n_cols() const noexcept { return static_cast<std::size_t>(years.size()); }
    double at(std::size_t age_idx, std::size_t col) const noexcept {
        return r[age_idx * n_cols() + col];
    }
};

ReductionMatrix reduction_matrix(const MortalityTable& table);

/// Number of overlapping two-column blocks available from a table.
std::size_t bootstrap_block_count(const MortalityTable& table);

/// Block indices drawn for one path; exposed so tests can audit sampling.
std::vector<std::size_t> bootstrap_block_draws(std::size_t n_candidates, int n_blocks,
                                               std::uint64_t seed, std::size_t path);

/// Non-parametric projection: each path draws n_blocks overlapping
/// two-year reduction blocks with replacement and applies them cumulatively
/// to the final observed year's rates, giving a 2 * n_blocks year horizon.
ScenarioSet simulate_bootstrap(const MortalityTable& table, int n_blocks, std::size_t n_paths,
                               std::uint64_t seed, unsigned threads = 1);

}  // namespace nathedge
