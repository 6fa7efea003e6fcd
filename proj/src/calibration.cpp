#include "nathedge/calibration.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "nathedge/error.hpp"

namespace nathedge {

std::string_view to_string(CalibrationMethod m) noexcept {
    switch (m) {
        case CalibrationMethod::None: return "none";
        case CalibrationMethod::VarianceMinimising: return "vm";
        case CalibrationMethod::DurationMatching: return "dm";
        case CalibrationMethod::DeltaNeutral: return "dn";
    }
    return "?";
}

CalibrationMethod parse_calibration_method(std::string_view name) {
    if (name == "none") return CalibrationMethod::None;
    if (name == "vm") return CalibrationMethod::VarianceMinimising;
    if (name == "dm") return CalibrationMethod::DurationMatching;
    if (name == "dn") return CalibrationMethod::DeltaNeutral;
    throw Error(Errc::ConfigError, "unknown calibration method '" + std::string(name) + "'");
}

HedgedPosition::HedgedPosition(PVSample annuity, PVSample insurance, double h)
    : annuity_(std::move(annuity)), insurance_(std::move(insurance)), h_(h) {
    if (annuity_.size() != insurance_.size()) {
        throw Error(Errc::EmptySample, "annuity and insurance samples are not paired");
    }
    if (annuity_.size() == 0) throw Error(Errc::EmptySample, "hedged position has no paths");
}

PVSample HedgedPosition::calibrated() const { return insurance_.scaled(h_); }

PVSample HedgedPosition::combined() const {
    std::vector<double> v(annuity_.values);
    for (std::size_t n = 0; n < v.size(); ++n) v[n] += h_ * insurance_.values[n];
    return PVSample(std::move(v));
}

std::vector<double> HedgedPosition::annuity_adjusted() const { return annuity_.mean_adjusted(); }
std::vector<double> HedgedPosition::calibrated_adjusted() const {
    return calibrated().mean_adjusted();
}
std::vector<double> HedgedPosition::combined_adjusted() const { return combined().mean_adjusted(); }

double sample_variance(std::span<const double> x) { return sample_covariance(x, x); }

double sample_covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(Errc::EmptySample, "covariance of unpaired samples");
    if (x.size() < 2) throw Error(Errc::EmptySample, "covariance needs at least two values");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / (n - 1.0);
}

double hedge_ratio_vm(const PVSample& annuity, const PVSample& insurance) {
    if (annuity.size() != insurance.size() || annuity.size() < 2) {
        throw Error(Errc::EmptySample, "variance minimisation needs two paired samples, N >= 2");
    }
    const double var_i = sample_variance(insurance.values);
    if (!(var_i > 1e-24 * insurance.mean * insurance.mean) || !(var_i > 0.0)) {
        throw Error(Errc::ZeroVarianceInstrument, "insurance present value has zero variance");
    }
    return -sample_covariance(annuity.values, insurance.values) / var_i;
}

DurationMatch hedge_ratio_dm(const Portfolio& annuity, const Portfolio& insurance,
                             const ScenarioSet& scenario, double delta, double eps,
                             unsigned threads) {
    if (!(eps > 0.0)) throw Error(Errc::ConfigError, "duration shift eps must be positive");
    double a_plus = 0.0, i_plus = 0.0, a_minus = 0.0, i_minus = 0.0;
    {
        const ScenarioSet up = shift_mortality(scenario, eps, threads);
        a_plus = portfolio_pv(up, annuity, delta, threads).mean;
        i_plus = portfolio_pv(up, insurance, delta, threads).mean;
    }
    {
        const ScenarioSet down = shift_mortality(scenario, -eps, threads);
        a_minus = portfolio_pv(down, annuity, delta, threads).mean;
        i_minus = portfolio_pv(down, insurance, delta, threads).mean;
    }
    DurationMatch out;
    out.annuity_duration = (a_plus - a_minus) / (2.0 * eps);
    out.insurance_duration = (i_plus - i_minus) / (2.0 * eps);
    const double scale = (std::abs(i_plus) + std::abs(i_minus)) / (2.0 * eps);
    if (!(std::abs(out.insurance_duration) > 1e-12 * scale)) {
        throw Error(Errc::ZeroDurationInstrument, "insurance mortality duration is zero");
    }
    out.hedge_ratio = -out.annuity_duration / out.insurance_duration;
    return out;
}

std::vector<double> longevity_deltas(const LCParams& params, const KappaPaths& kappa, int x,
                                     int max_t, unsigned threads) {
    if (max_t < 0 || max_t > kappa.horizon) {
        throw Error(Errc::HorizonExceeded, "delta horizon " + std::to_string(max_t) +
                                               " outside the kappa paths");
    }
    std::vector<double> out(static_cast<std::size_t>(max_t) + 1, 0.0);
    if (max_t == 0) return out;
    if (!params.ages.contains(x) || !params.ages.contains(x + max_t - 1)) {
        throw Error(Errc::AgeOutOfRange, "longevity delta needs beta for ages " +
                                             std::to_string(x) + ".." +
                                             std::to_string(x + max_t - 1));
    }
    const auto T = static_cast<std::size_t>(max_t);
    std::vector<double> alpha(T);
    std::vector<double> beta(T);
    for (std::size_t s = 0; s < T; ++s) {
        alpha[s] = params.alpha_at(x + static_cast<int>(s));
        beta[s] = params.beta_at(x + static_cast<int>(s));
    }

    // Per path: Z(T) = sum_{s<=T} m_s and B(T) = sum_{s<=T} beta_s m_s, so
    // sum_s beta_s exp(Y_s - Z(T)) = B(T) exp(-Z(T)).
    const std::size_t n_paths = kappa.n_paths;
    std::vector<double> partial(n_paths * T);
    parallel_for(n_paths, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            double z = 0.0;
            double bsum = 0.0;
            for (std::size_t s = 0; s < T; ++s) {
                const double m = std::exp(alpha[s] + beta[s] * kappa.at(n, static_cast<int>(s) + 1));
                z += m;
                bsum += beta[s] * m;
                partial[n * T + s] = bsum * std::exp(-z);
            }
        }
    });
    // Reduce in path order so the estimate does not depend on threading.
    for (std::size_t s = 0; s < T; ++s) {
        double acc = 0.0;
        for (std::size_t n = 0; n < n_paths; ++n) acc += partial[n * T + s];
        out[s + 1] = -acc / static_cast<double>(n_paths);
    }
    return out;
}

double longevity_delta(const LCParams& params, const KappaPaths& kappa, int x, int t,
                       unsigned threads) {
    return longevity_deltas(params, kappa, x, t, threads).back();
}

DeltaNeutral hedge_ratio_dn(const LCParams& params, const KappaPaths& kappa,
                            const Portfolio& annuity, const Portfolio& insurance, double delta,
                            unsigned threads) {
    // Delta curves are shared between products with the same issue age.
    std::map<int, std::vector<double>> curves;
    auto curve = [&](int x, int max_t) -> const std::vector<double>& {
        auto it = curves.find(x);
        if (it == curves.end() || static_cast<int>(it->second.size()) < max_t + 1) {
            it = curves.insert_or_assign(x, longevity_deltas(params, kappa, x, max_t, threads)).first;
        }
        return it->second;
    };
    auto portfolio_delta = [&](const Portfolio& pf) {
        double d = 0.0;
        for (const auto& p : pf.annuities()) {
            const int last = p.deferral + p.n_payments - 1;
            const auto& dx = curve(p.issue_age, last);
            for (int k = p.deferral; k <= last; ++k) {
                d += p.weight * p.payment * std::exp(-delta * k) * dx[static_cast<std::size_t>(k)];
            }
        }
        for (const auto& p : pf.insurances()) {
            const auto& dx = curve(p.issue_age, p.term);
            for (int k = 0; k < p.term; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                d += p.weight * p.benefit * std::exp(-delta * (k + 1)) * (dx[kk] - dx[kk + 1]);
            }
        }
        return d;
    };
    // Precompute the longest curve per age so the cache never shrinks.
    for (const Portfolio* pf : {&annuity, &insurance}) {
        std::map<int, int> need;
        for (const auto& p : pf->annuities()) {
            need[p.issue_age] = std::max(need[p.issue_age], p.deferral + p.n_payments - 1);
        }
        for (const auto& p : pf->insurances()) {
            need[p.issue_age] = std::max(need[p.issue_age], p.term);
        }
        for (const auto& [x, t] : need) (void)curve(x, t);
    }

    DeltaNeutral out;
    out.annuity_delta = portfolio_delta(annuity);
    out.insurance_delta = portfolio_delta(insurance);
    if (!(std::abs(out.insurance_delta) > 0.0) ||
        std::abs(out.insurance_delta) < 1e-14 * std::abs(out.annuity_delta)) {
        throw Error(Errc::ZeroDeltaInstrument, "insurance longevity delta is zero");
    }
    out.hedge_ratio = -out.annuity_delta / out.insurance_delta;
    return out;
}

}  // namespace nathedge
