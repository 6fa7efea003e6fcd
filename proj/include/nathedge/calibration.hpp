#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nathedge/mortality_models.hpp"
#include "nathedge/portfolio.hpp"

namespace nathedge {

enum class CalibrationMethod { None, VarianceMinimising, DurationMatching, DeltaNeutral };

std::string_view to_string(CalibrationMethod m) noexcept;
CalibrationMethod parse_calibration_method(std::string_view name);

/// Annuity and insurance present values paired path by path, plus the hedge
/// ratio h. The calibrated insurance position is h * I and the hedged
/// position is A + h * I.
class HedgedPosition {
public:
    HedgedPosition(PVSample annuity, PVSample insurance, double h);

    const PVSample& annuity() const noexcept { return annuity_; }
    const PVSample& insurance() const noexcept { return insurance_; }
    double hedge_ratio() const noexcept { return h_; }
    std::size_t size() const noexcept { return annuity_.size(); }

    PVSample calibrated() const;  // L = h * I
    PVSample combined() const;    // P = A + L

    std::vector<double> annuity_adjusted() const;     // A - mean(A)
    std::vector<double> calibrated_adjusted() const;  // L - mean(L)
    std::vector<double> combined_adjusted() const;    // P - mean(P)

private:
    PVSample annuity_;
    PVSample insurance_;
    double h_;
};

/// Sample statistics with denominator N - 1.
double sample_variance(std::span<const double> x);
double sample_covariance(std::span<const double> x, std::span<const double> y);

/// h = -Cov(A, I) / Var(I).
double hedge_ratio_vm(const PVSample& annuity, const PVSample& insurance);

struct DurationMatch {
    double hedge_ratio = 0.0;
    double annuity_duration = 0.0;    // (A+ - A-) / (2 eps)
    double insurance_duration = 0.0;  // (I+ - I-) / (2 eps)
};

/// Central-difference mortality durations under a parallel additive shift of
/// the central death rate surface by +-eps; h = -D_A / D_I.
DurationMatch hedge_ratio_dm(const Portfolio& annuity, const Portfolio& insurance,
                             const ScenarioSet& scenario, double delta, double eps = 1e-4,
                             unsigned threads = 1);

/// Longevity deltas dS_x(T)/d kappa_0 for T = 0..max_t, estimated by Monte
/// Carlo over the supplied kappa paths.
std::vector<double> longevity_deltas(const LCParams& params, const KappaPaths& kappa, int x,
                                     int max_t, unsigned threads = 1);

/// Single Delta_x(T).
double longevity_delta(const LCParams& params, const KappaPaths& kappa, int x, int t,
                       unsigned threads = 1);

struct DeltaNeutral {
    double hedge_ratio = 0.0;
    double annuity_delta = 0.0;
    double insurance_delta = 0.0;
};

/// h = -Delta_A / Delta_I under the Lee-Carter model.
DeltaNeutral hedge_ratio_dn(const LCParams& params, const KappaPaths& kappa,
                            const Portfolio& annuity, const Portfolio& insurance, double delta,
                            unsigned threads = 1);

}  // namespace nathedge
