#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "nathedge/mortality_table.hpp"
#include "nathedge/random.hpp"

namespace nathedge {

std::string_view to_string(GeneratorKind kind) noexcept;

/// N simulated paths of one-year death probabilities q(n, x, s) for ages x
/// and projection years s = 1..horizon. Year s covers calendar year
/// base_year + s. Immutable once built.
class ScenarioSet {
public:
    ScenarioSet(GeneratorKind generator, std::uint64_t seed, int base_year, IntRange ages,
                int horizon, std::size_t n_paths, std::vector<double> q);

    GeneratorKind generator() const noexcept { return generator_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int base_year() const noexcept { return base_year_; }
    const IntRange& ages() const noexcept { return ages_; }
    int horizon() const noexcept { return horizon_; }
    std::size_t n_paths() const noexcept { return n_paths_; }
    std::size_t n_ages() const noexcept { return static_cast<std::size_t>(ages_.size()); }

    /// q for path n, calendar age, projection year s in 1..horizon (unchecked).
    double q(std::size_t n, int age, int s) const noexcept {
        return q_[index(n, static_cast<std::size_t>(age - ages_.lo), static_cast<std::size_t>(s - 1))];
    }
    const std::vector<double>& values() const noexcept { return q_; }

    std::size_t index(std::size_t n, std::size_t age_idx, std::size_t s0) const noexcept {
        return (n * n_ages() + age_idx) * static_cast<std::size_t>(horizon_) + s0;
    }

private:
    GeneratorKind generator_;
    std::uint64_t seed_;
    int base_year_;
    IntRange ages_;
    int horizon_;
    std::size_t n_paths_;
    std::vector<double> q_;
};

/// Checks that a cohort aged x at time 0 can be followed for max_t years.
void check_cohort_coverage(const ScenarioSet& sc, int x, int max_t);

/// S_x(T) for T = 0..max_t along the cohort diagonal of path n.
std::vector<double> survival_curve(const ScenarioSet& sc, std::size_t n, int x, int max_t);

/// Same as survival_curve without coverage checks or allocation;
/// out.size() must be max_t + 1.
void survival_curve_into(const ScenarioSet& sc, std::size_t n, int x, std::span<double> out) noexcept;

/// Scenario with every central death rate shifted by eps: m = -ln(1 - q),
/// q' = 1 - exp(-(m + eps)). Throws NegativeRate if any shifted rate is <= 0.
ScenarioSet shift_mortality(const ScenarioSet& sc, double eps, unsigned threads = 1);

/// Cache dump: a `# generator=.. seed=.. base_year=.. horizon=.. paths=..`
/// comment line, then `path,age,year,q` rows.
void write_scenarios_csv(std::ostream& out, const ScenarioSet& sc);
ScenarioSet read_scenarios_csv(std::istream& in);

}  // namespace nathedge
