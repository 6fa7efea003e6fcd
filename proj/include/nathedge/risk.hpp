#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nathedge/calibration.hpp"

namespace nathedge {

/// ceil(x) that ignores representation error, e.g. (1 - 0.95) * 100 -> 5.
std::size_t ceil_count(double x) noexcept;

/// Empirical VaR: the ceil(alpha N)-th smallest value.
double value_at_risk(std::span<const double> sample, double alpha);

/// Mean of the ceil((1 - alpha) N) largest values.
double expected_shortfall(std::span<const double> sample, double alpha);

struct RiskReport {
    double alpha = 0.95;
    double mean = 0.0;
    double variance = 0.0;
    double var_alpha = 0.0;
    double es_alpha = 0.0;
    /// VaR of the mean-adjusted sample, i.e. VaR - mean.
    double mean_adjusted_var_alpha = 0.0;
};

RiskReport risk_report(std::span<const double> sample, double alpha);

/// Reports for the annuity, calibrated insurance and hedged positions.
struct PositionSummary {
    RiskReport annuity;
    RiskReport calibrated;
    RiskReport combined;
};

PositionSummary summarize(const HedgedPosition& position, double alpha);

enum class Outcome {
    PerfectHedge,
    TooMuchInsuranceSurplus,
    TooMuchInsuranceDeficit,
    NotEnoughInsuranceSurplus,
    NotEnoughInsuranceDeficit,
    NoHedgingEffectSurplus,
    NoHedgingEffectDeficit,
};

inline constexpr std::size_t kOutcomeCount = 7;

std::string_view to_string(Outcome o) noexcept;

/// Hedging outcome of one mean-adjusted realisation (annuity deviation a,
/// calibrated insurance deviation l). Surplus or deficit is the sign of a + l.
Outcome classify_outcome(double a, double l, double tol = 0.0) noexcept;

/// One row of the risk-report CSV.
struct ReportRow {
    std::string portfolio;
    RiskReport report;
};

/// Columns: portfolio,mean,variance,var95,es95,var95_minus_mean (the "95"
/// follows alpha).
void write_risk_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace nathedge
