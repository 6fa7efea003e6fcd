#include "nathedge/risk.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nathedge/error.hpp"
#include "nathedge/text.hpp"

namespace nathedge {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(Errc::ConfigError, "confidence level must lie in (0, 1)");
    }
}

std::vector<double> sorted_copy(std::span<const double> sample) {
    if (sample.empty()) throw Error(Errc::EmptySample, "risk measure of an empty sample");
    std::vector<double> v(sample.begin(), sample.end());
    std::sort(v.begin(), v.end());
    return v;
}

std::string alpha_tag(double alpha) {
    return text::fixed(alpha * 100.0, 4);
}

}  // namespace

std::size_t ceil_count(double x) noexcept {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
        return static_cast<std::size_t>(std::max(r, 0.0));
    }
    return static_cast<std::size_t>(std::max(std::ceil(x), 0.0));
}

double value_at_risk(std::span<const double> sample, double alpha) {
    check_alpha(alpha);
    const auto v = sorted_copy(sample);
    const std::size_t k = std::clamp<std::size_t>(ceil_count(alpha * static_cast<double>(v.size())),
                                                  1, v.size());
    return v[k - 1];
}

double expected_shortfall(std::span<const double> sample, double alpha) {
    check_alpha(alpha);
    const auto v = sorted_copy(sample);
    const std::size_t tail =
        std::clamp<std::size_t>(ceil_count((1.0 - alpha) * static_cast<double>(v.size())), 1,
                                v.size());
    double s = 0.0;
    for (std::size_t i = v.size() - tail; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(tail);
}

RiskReport risk_report(std::span<const double> sample, double alpha) {
    check_alpha(alpha);
    if (sample.empty()) throw Error(Errc::EmptySample, "risk report of an empty sample");
    RiskReport r;
    r.alpha = alpha;
    double s = 0.0;
    for (double x : sample) s += x;
    r.mean = s / static_cast<double>(sample.size());
    r.variance = sample.size() > 1 ? sample_variance(sample) : 0.0;
    r.var_alpha = value_at_risk(sample, alpha);
    r.es_alpha = expected_shortfall(sample, alpha);
    r.mean_adjusted_var_alpha = r.var_alpha - r.mean;
    return r;
}

PositionSummary summarize(const HedgedPosition& position, double alpha) {
    return PositionSummary{risk_report(position.annuity().values, alpha),
                           risk_report(position.calibrated().values, alpha),
                           risk_report(position.combined().values, alpha)};
}

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::PerfectHedge: return "PerfectHedge";
        case Outcome::TooMuchInsuranceSurplus: return "TooMuchInsurance-Surplus";
        case Outcome::TooMuchInsuranceDeficit: return "TooMuchInsurance-Deficit";
        case Outcome::NotEnoughInsuranceSurplus: return "NotEnoughInsurance-Surplus";
        case Outcome::NotEnoughInsuranceDeficit: return "NotEnoughInsurance-Deficit";
        case Outcome::NoHedgingEffectSurplus: return "NoHedgingEffect-Surplus";
        case Outcome::NoHedgingEffectDeficit: return "NoHedgingEffect-Deficit";
    }
    return "?";
}

Outcome classify_outcome(double a, double l, double tol) noexcept {
    const double net = a + l;
    if (std::abs(net) <= tol) return Outcome::PerfectHedge;
    const bool surplus = net > 0.0;
    // Same sign (zero counts with either side): neither leg offsets the other.
    if ((a >= 0.0 && l >= 0.0) || (a <= 0.0 && l <= 0.0)) {
        return surplus ? Outcome::NoHedgingEffectSurplus : Outcome::NoHedgingEffectDeficit;
    }
    if (std::abs(l) < std::abs(a)) {
        return surplus ? Outcome::NotEnoughInsuranceSurplus : Outcome::NotEnoughInsuranceDeficit;
    }
    return surplus ? Outcome::TooMuchInsuranceSurplus : Outcome::TooMuchInsuranceDeficit;
}

void write_risk_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    const std::string tag = rows.empty() ? "95" : alpha_tag(rows.front().report.alpha);
    out << "portfolio,mean,variance,var" << tag << ",es" << tag << ",var" << tag
        << "_minus_mean\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << row.portfolio << ',' << text::shortest(r.mean) << ',' << text::shortest(r.variance)
            << ',' << text::shortest(r.var_alpha) << ',' << text::shortest(r.es_alpha) << ','
            << text::shortest(r.mean_adjusted_var_alpha) << '\n';
    }
}

}  // namespace nathedge
