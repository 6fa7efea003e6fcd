#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nathedge/mortality_table.hpp"
#include "nathedge/scenario.hpp"

namespace nathedge {

// ---------------------------------------------------------------------------
// Lee-Carter: ln m(x,t) = alpha_x + beta_x * kappa_t, with kappa a random
// walk with drift. Identified by sum(beta) = 1 and sum(kappa) = 0.
// ---------------------------------------------------------------------------

struct LCParams {
    IntRange ages;
    IntRange years;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> kappa;
    double drift = 0.0;
    double step_sd = 0.0;
    /// Period index at the final fitted year; the starting point of projections.
    double last_kappa = 0.0;

    double alpha_at(int age) const { return alpha[static_cast<std::size_t>(age - ages.lo)]; }
    double beta_at(int age) const { return beta[static_cast<std::size_t>(age - ages.lo)]; }
};

/// Classical SVD fit: alpha is the row mean of log rates, (beta, kappa) the
/// leading singular pair of the centred matrix rescaled to the constraints.
/// The walk's drift is the mean increment of kappa and step_sd the sample
/// standard deviation of the increments (denominator T - 2).
LCParams fit_lee_carter(const MortalityTable& table);

/// Simulated period-index paths kappa(n, s), s = 1..horizon, from last_kappa.
struct KappaPaths {
    std::size_t n_paths = 0;
    int horizon = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // [n][s - 1]

    double at(std::size_t n, int s) const noexcept {
        return values[n * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(s - 1)];
    }
    /// Copy with every path displaced by delta (a shift of the starting index).
    KappaPaths shifted(double delta) const;
};

KappaPaths simulate_lc_kappa(const LCParams& params, int horizon, std::size_t n_paths,
                             std::uint64_t seed, unsigned threads = 1);

/// Death probabilities q = 1 - exp(-m) implied by the kappa paths. Ages above
/// the top fitted age reuse the top age's parameters; ages below the fitted
/// range are rejected.
ScenarioSet lc_scenarios(const LCParams& params, const KappaPaths& kappa, IntRange ages,
                         unsigned threads = 1);

ScenarioSet simulate_lc(const LCParams& params, IntRange ages, int horizon, std::size_t n_paths,
                        std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Cairns-Blake-Dowd: logit q(x,t) = kappa1_t + kappa2_t (x - xbar), with the
// pair (kappa1, kappa2) a bivariate random walk with drift.
// ---------------------------------------------------------------------------

struct CBDParams {
    IntRange ages;
    IntRange years;
    std::vector<double> kappa1;
    std::vector<double> kappa2;
    double xbar = 0.0;
    std::array<double, 2> drift{};
    /// Row-major 2x2 covariance of joint increments.
    std::array<double, 4> incr_cov{};
};

/// Per-year least squares of logit q on (x - xbar) with q = 1 - exp(-m).
CBDParams fit_cbd(const MortalityTable& table);

ScenarioSet simulate_cbd(const CBDParams& params, IntRange ages, int horizon, std::size_t n_paths,
                         std::uint64_t seed, unsigned threads = 1);

/// Lower-triangular factor L with L L^T = cov. Falls back to the symmetric
/// square root with negative eigenvalues clipped to zero when cov is only
/// semidefinite.
std::array<double, 4> covariance_factor(const std::array<double, 4>& cov);

}  // namespace nathedge
