#pragma once

#include <cstddef>
#include <vector>

#include "nathedge/scenario.hpp"

namespace nathedge {

/// Deferred temporary life annuity: payments of `payment` at the start of
/// years k = deferral .. deferral + n_payments - 1 while the annuitant lives.
struct AnnuityProduct {
    int issue_age = 0;
    double weight = 1.0;
    int deferral = 0;
    int n_payments = 1;
    double payment = 1.0;
};

/// Term insurance paying `benefit` at the end of the year of death within
/// `term` years. Whole life is term = limiting age - issue age.
struct InsuranceProduct {
    int issue_age = 0;
    double weight = 1.0;
    int term = 1;
    double benefit = 1.0;
};

enum class PortfolioKind { Annuity, Insurance };

/// Homogeneous weighted product list; weights sum to one.
class Portfolio {
public:
    static Portfolio annuity(std::vector<AnnuityProduct> products);
    static Portfolio insurance(std::vector<InsuranceProduct> products);

    PortfolioKind kind() const noexcept { return kind_; }
    const std::vector<AnnuityProduct>& annuities() const noexcept { return annuities_; }
    const std::vector<InsuranceProduct>& insurances() const noexcept { return insurances_; }
    std::size_t size() const noexcept;

    /// Longest survival horizon any product needs.
    int required_horizon() const noexcept;
    /// Highest age whose death probability any product needs.
    int highest_age() const noexcept;
    int lowest_age() const noexcept;

    /// Copy with every payment or benefit multiplied by `factor`.
    Portfolio scaled(double factor) const;

private:
    PortfolioKind kind_ = PortfolioKind::Annuity;
    std::vector<AnnuityProduct> annuities_;
    std::vector<InsuranceProduct> insurances_;
};

/// Per-path present values with their sample mean (the EPV estimate).
struct PVSample {
    std::vector<double> values;
    double mean = 0.0;

    PVSample() = default;
    explicit PVSample(std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
    PVSample scaled(double h) const;
    std::vector<double> mean_adjusted() const;
};

/// delta = ln(1 + i).
double force_of_interest(double annual_rate);

/// Throws CoverageError when some product outlives the scenario grid.
void check_coverage(const ScenarioSet& sc, const Portfolio& pf);

PVSample annuity_pv(const ScenarioSet& sc, const Portfolio& pf, double delta, unsigned threads = 1);
PVSample insurance_pv(const ScenarioSet& sc, const Portfolio& pf, double delta,
                      unsigned threads = 1);
/// Dispatches on the portfolio kind.
PVSample portfolio_pv(const ScenarioSet& sc, const Portfolio& pf, double delta,
                      unsigned threads = 1);

}  // namespace nathedge
