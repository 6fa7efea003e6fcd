#include "nathedge/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nathedge/error.hpp"

namespace nathedge {

namespace {

constexpr double kWeightTolerance = 1e-10;

template <typename P>
void check_weights(const std::vector<P>& products) {
    if (products.empty()) throw Error(Errc::ConfigError, "portfolio has no products");
    double total = 0.0;
    for (const auto& p : products) {
        if (!(p.weight > 0.0 && p.weight <= 1.0)) {
            throw Error(Errc::ConfigError, "product weight must lie in (0, 1]");
        }
        total += p.weight;
    }
    if (std::abs(total - 1.0) > kWeightTolerance) {
        throw Error(Errc::ConfigError, "portfolio weights sum to " + std::to_string(total));
    }
}

int annuity_horizon(const AnnuityProduct& p) { return p.deferral + p.n_payments - 1; }

}  // namespace

Portfolio Portfolio::annuity(std::vector<AnnuityProduct> products) {
    check_weights(products);
    for (const auto& p : products) {
        if (p.deferral < 0 || p.n_payments < 1 || !(p.payment > 0.0)) {
            throw Error(Errc::ConfigError,
                        "annuity needs deferral >= 0, payments >= 1 and a positive payment");
        }
    }
    Portfolio pf;
    pf.kind_ = PortfolioKind::Annuity;
    pf.annuities_ = std::move(products);
    return pf;
}

Portfolio Portfolio::insurance(std::vector<InsuranceProduct> products) {
    check_weights(products);
    for (const auto& p : products) {
        if (p.term < 1 || !(p.benefit > 0.0)) {
            throw Error(Errc::ConfigError, "insurance needs term >= 1 and a positive benefit");
        }
    }
    Portfolio pf;
    pf.kind_ = PortfolioKind::Insurance;
    pf.insurances_ = std::move(products);
    return pf;
}

std::size_t Portfolio::size() const noexcept {
    return kind_ == PortfolioKind::Annuity ? annuities_.size() : insurances_.size();
}

int Portfolio::required_horizon() const noexcept {
    int h = 0;
    for (const auto& p : annuities_) h = std::max(h, annuity_horizon(p));
    for (const auto& p : insurances_) h = std::max(h, p.term);
    return h;
}

int Portfolio::highest_age() const noexcept {
    int top = 0;
    for (const auto& p : annuities_) {
        top = std::max(top, p.issue_age + std::max(annuity_horizon(p) - 1, 0));
    }
    for (const auto& p : insurances_) top = std::max(top, p.issue_age + p.term - 1);
    return top;
}

int Portfolio::lowest_age() const noexcept {
    int lo = 1 << 30;
    for (const auto& p : annuities_) lo = std::min(lo, p.issue_age);
    for (const auto& p : insurances_) lo = std::min(lo, p.issue_age);
    return lo;
}

Portfolio Portfolio::scaled(double factor) const {
    Portfolio out = *this;
    for (auto& p : out.annuities_) p.payment *= factor;
    for (auto& p : out.insurances_) p.benefit *= factor;
    return out;
}

PVSample::PVSample(std::vector<double> v) : values(std::move(v)) {
    if (!values.empty()) {
        mean = std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
    }
}

PVSample PVSample::scaled(double h) const {
    std::vector<double> v(values);
    for (auto& x : v) x *= h;
    return PVSample(std::move(v));
}

std::vector<double> PVSample::mean_adjusted() const {
    std::vector<double> v(values);
    for (auto& x : v) x -= mean;
    return v;
}

double force_of_interest(double annual_rate) {
    if (!(annual_rate > -1.0)) throw Error(Errc::ConfigError, "interest rate must exceed -100%");
    return std::log1p(annual_rate);
}

void check_coverage(const ScenarioSet& sc, const Portfolio& pf) {
    auto check = [&](int x, int max_t) {
        try {
            check_cohort_coverage(sc, x, max_t);
        } catch (const Error& e) {
            throw Error(Errc::CoverageError, std::string("product outlives scenario grid (") +
                                                 e.what() + ")");
        }
    };
    for (const auto& p : pf.annuities()) check(p.issue_age, annuity_horizon(p));
    for (const auto& p : pf.insurances()) check(p.issue_age, p.term);
}

PVSample annuity_pv(const ScenarioSet& sc, const Portfolio& pf, double delta, unsigned threads) {
    if (pf.kind() != PortfolioKind::Annuity) {
        throw Error(Errc::ConfigError, "annuity_pv called with an insurance portfolio");
    }
    check_coverage(sc, pf);
    const auto& products = pf.annuities();
    const int max_t = pf.required_horizon();

    // Discounted payment schedule per product, indexed by payment epoch k.
    std::vector<std::vector<double>> flows;
    for (const auto& p : products) {
        std::vector<double> f(static_cast<std::size_t>(max_t) + 1, 0.0);
        for (int k = p.deferral; k <= annuity_horizon(p); ++k) {
            f[static_cast<std::size_t>(k)] = p.weight * p.payment * std::exp(-delta * k);
        }
        flows.push_back(std::move(f));
    }

    std::vector<double> values(sc.n_paths());
    parallel_for(sc.n_paths(), threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> surv(static_cast<std::size_t>(max_t) + 1);
        for (std::size_t n = b; n < e; ++n) {
            double pv = 0.0;
            for (std::size_t j = 0; j < products.size(); ++j) {
                const auto& p = products[j];
                const auto len = static_cast<std::size_t>(annuity_horizon(p)) + 1;
                std::span<double> s(surv.data(), len);
                survival_curve_into(sc, n, p.issue_age, s);
                for (std::size_t k = static_cast<std::size_t>(p.deferral); k < len; ++k) {
                    pv += flows[j][k] * s[k];
                }
            }
            values[n] = pv;
        }
    });
    return PVSample(std::move(values));
}

PVSample insurance_pv(const ScenarioSet& sc, const Portfolio& pf, double delta, unsigned threads) {
    if (pf.kind() != PortfolioKind::Insurance) {
        throw Error(Errc::ConfigError, "insurance_pv called with an annuity portfolio");
    }
    check_coverage(sc, pf);
    const auto& products = pf.insurances();
    const int max_t = pf.required_horizon();

    std::vector<std::vector<double>> flows;
    for (const auto& p : products) {
        std::vector<double> f(static_cast<std::size_t>(p.term));
        for (int k = 0; k < p.term; ++k) {
            f[static_cast<std::size_t>(k)] = p.weight * p.benefit * std::exp(-delta * (k + 1));
        }
        flows.push_back(std::move(f));
    }

    std::vector<double> values(sc.n_paths());
    parallel_for(sc.n_paths(), threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> surv(static_cast<std::size_t>(max_t) + 1);
        for (std::size_t n = b; n < e; ++n) {
            double pv = 0.0;
            for (std::size_t j = 0; j < products.size(); ++j) {
                const auto& p = products[j];
                const auto term = static_cast<std::size_t>(p.term);
                std::span<double> s(surv.data(), term + 1);
                survival_curve_into(sc, n, p.issue_age, s);
                for (std::size_t k = 0; k < term; ++k) pv += flows[j][k] * (s[k] - s[k + 1]);
            }
            values[n] = pv;
        }
    });
    return PVSample(std::move(values));
}

PVSample portfolio_pv(const ScenarioSet& sc, const Portfolio& pf, double delta, unsigned threads) {
    return pf.kind() == PortfolioKind::Annuity ? annuity_pv(sc, pf, delta, threads)
                                               : insurance_pv(sc, pf, delta, threads);
}

}  // namespace nathedge
