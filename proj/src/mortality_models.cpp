#include "nathedge/mortality_models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "nathedge/error.hpp"

namespace nathedge {

namespace {

void require_shape(const MortalityTable& table, std::size_t min_years, std::size_t min_ages) {
    if (table.n_years() < min_years) {
        throw Error(Errc::TooFewYears, "model fitting needs at least " + std::to_string(min_years) +
                                           " years, table has " +
                                           std::to_string(table.n_years()));
    }
    if (table.n_ages() < min_ages) {
        throw Error(Errc::DegenerateMatrix, "model fitting needs at least " +
                                                std::to_string(min_ages) + " ages");
    }
}

// Row of the fitted parameter vectors to use for a calendar age.
std::size_t fitted_row(const IntRange& fitted, int age) {
    if (age < fitted.lo) {
        throw Error(Errc::AgeOutOfRange, "age " + std::to_string(age) +
                                             " below fitted range starting at " +
                                             std::to_string(fitted.lo));
    }
    return static_cast<std::size_t>(std::min(age, fitted.hi) - fitted.lo);
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

constexpr double kOneBelowOne = 0x1.fffffffffffffp-1;

}  // namespace

LCParams fit_lee_carter(const MortalityTable& table) {
    require_shape(table, 3, 2);
    const auto n_ages = static_cast<Eigen::Index>(table.n_ages());
    const auto n_years = static_cast<Eigen::Index>(table.n_years());

    Eigen::MatrixXd logm(n_ages, n_years);
    for (Eigen::Index a = 0; a < n_ages; ++a) {
        for (Eigen::Index t = 0; t < n_years; ++t) {
            logm(a, t) = std::log(table.at(static_cast<std::size_t>(a), static_cast<std::size_t>(t)));
        }
    }
    const Eigen::VectorXd alpha = logm.rowwise().mean();
    const Eigen::MatrixXd centred = logm.colwise() - alpha;

    LCParams p;
    p.ages = table.ages();
    p.years = table.years();
    p.alpha.assign(alpha.data(), alpha.data() + n_ages);
    p.beta.assign(static_cast<std::size_t>(n_ages), 1.0 / static_cast<double>(n_ages));
    p.kappa.assign(static_cast<std::size_t>(n_years), 0.0);

    const double scale = centred.cwiseAbs().maxCoeff();
    // Rounding residue of a constant table is not a period effect.
    if (scale > 1e-13 * logm.cwiseAbs().maxCoeff()) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double sigma = svd.singularValues()(0);
        const Eigen::VectorXd u = svd.matrixU().col(0);
        const Eigen::VectorXd v = svd.matrixV().col(0);
        const double usum = u.sum();
        if (std::abs(usum) < 1e-10) {
            throw Error(Errc::DegenerateMatrix,
                        "leading age profile sums to zero; cannot impose sum(beta) = 1");
        }
        for (Eigen::Index a = 0; a < n_ages; ++a) p.beta[static_cast<std::size_t>(a)] = u(a) / usum;
        for (Eigen::Index t = 0; t < n_years; ++t) {
            p.kappa[static_cast<std::size_t>(t)] = sigma * usum * v(t);
        }
        // Rows of the centred matrix sum to zero, so kappa already sums to
        // zero up to rounding; remove the residue and absorb it in alpha.
        const double kbar = mean_of(p.kappa);
        for (auto& k : p.kappa) k -= kbar;
        for (std::size_t a = 0; a < p.alpha.size(); ++a) p.alpha[a] += p.beta[a] * kbar;
    }

    std::vector<double> diffs(p.kappa.size() - 1);
    for (std::size_t t = 1; t < p.kappa.size(); ++t) diffs[t - 1] = p.kappa[t] - p.kappa[t - 1];
    p.drift = mean_of(diffs);
    double ss = 0.0;
    for (double d : diffs) ss += (d - p.drift) * (d - p.drift);
    p.step_sd = std::sqrt(ss / static_cast<double>(diffs.size() - 1));
    p.last_kappa = p.kappa.back();
    return p;
}

KappaPaths KappaPaths::shifted(double delta) const {
    KappaPaths out = *this;
    for (auto& k : out.values) k += delta;
    return out;
}

KappaPaths simulate_lc_kappa(const LCParams& params, int horizon, std::size_t n_paths,
                             std::uint64_t seed, unsigned threads) {
    if (horizon < 1) throw Error(Errc::HorizonExceeded, "horizon must be >= 1");
    if (n_paths < 1) throw Error(Errc::EmptySample, "need at least one path");
    KappaPaths out;
    out.n_paths = n_paths;
    out.horizon = horizon;
    out.seed = seed;
    out.values.resize(n_paths * static_cast<std::size_t>(horizon));
    const auto h = static_cast<std::size_t>(horizon);
    parallel_for(n_paths, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            auto eng = path_engine(seed, GeneratorKind::LeeCarter, n);
            std::normal_distribution<double> z(0.0, 1.0);
            double k = params.last_kappa;
            for (std::size_t s = 0; s < h; ++s) {
                k += params.drift + params.step_sd * z(eng);
                out.values[n * h + s] = k;
            }
        }
    });
    return out;
}

ScenarioSet lc_scenarios(const LCParams& params, const KappaPaths& kappa, IntRange ages,
                         unsigned threads) {
    std::vector<std::size_t> rows;
    for (int a = ages.lo; a <= ages.hi; ++a) rows.push_back(fitted_row(params.ages, a));
    const std::size_t n_ages = rows.size();
    const auto h = static_cast<std::size_t>(kappa.horizon);
    std::vector<double> q(kappa.n_paths * n_ages * h);
    parallel_for(kappa.n_paths, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            for (std::size_t ai = 0; ai < n_ages; ++ai) {
                const double al = params.alpha[rows[ai]];
                const double be = params.beta[rows[ai]];
                for (std::size_t s = 0; s < h; ++s) {
                    const double m = std::exp(al + be * kappa.values[n * h + s]);
                    q[(n * n_ages + ai) * h + s] = std::min(-std::expm1(-m), kOneBelowOne);
                }
            }
        }
    });
    return ScenarioSet(GeneratorKind::LeeCarter, kappa.seed, params.years.hi, ages, kappa.horizon,
                       kappa.n_paths, std::move(q));
}

ScenarioSet simulate_lc(const LCParams& params, IntRange ages, int horizon, std::size_t n_paths,
                        std::uint64_t seed, unsigned threads) {
    for (int a = ages.lo; a <= ages.hi; ++a) (void)fitted_row(params.ages, a);
    return lc_scenarios(params, simulate_lc_kappa(params, horizon, n_paths, seed, threads), ages,
                        threads);
}

CBDParams fit_cbd(const MortalityTable& table) {
    require_shape(table, 3, 3);
    CBDParams p;
    p.ages = table.ages();
    p.years = table.years();
    const std::size_t n_ages = table.n_ages();
    const std::size_t n_years = table.n_years();

    p.xbar = 0.5 * (table.ages().lo + table.ages().hi);
    double sxx = 0.0;
    for (std::size_t a = 0; a < n_ages; ++a) {
        const double dx = table.ages().lo + static_cast<double>(a) - p.xbar;
        sxx += dx * dx;
    }
    if (!(sxx > 0.0)) throw Error(Errc::DegenerateMatrix, "age regressor has no spread");

    p.kappa1.resize(n_years);
    p.kappa2.resize(n_years);
    for (std::size_t t = 0; t < n_years; ++t) {
        double sy = 0.0;
        double sxy = 0.0;
        for (std::size_t a = 0; a < n_ages; ++a) {
            const double q = -std::expm1(-table.at(a, t));
            const double y = std::log(q / (1.0 - q));
            const double dx = table.ages().lo + static_cast<double>(a) - p.xbar;
            sy += y;
            sxy += dx * y;
        }
        // Regressor is centred, so the intercept is the plain mean.
        p.kappa1[t] = sy / static_cast<double>(n_ages);
        p.kappa2[t] = sxy / sxx;
    }

    const std::size_t n_inc = n_years - 1;
    std::vector<double> d1(n_inc);
    std::vector<double> d2(n_inc);
    for (std::size_t t = 0; t < n_inc; ++t) {
        d1[t] = p.kappa1[t + 1] - p.kappa1[t];
        d2[t] = p.kappa2[t + 1] - p.kappa2[t];
    }
    p.drift = {mean_of(d1), mean_of(d2)};
    double c11 = 0.0;
    double c12 = 0.0;
    double c22 = 0.0;
    for (std::size_t t = 0; t < n_inc; ++t) {
        const double e1 = d1[t] - p.drift[0];
        const double e2 = d2[t] - p.drift[1];
        c11 += e1 * e1;
        c12 += e1 * e2;
        c22 += e2 * e2;
    }
    const double denom = static_cast<double>(n_inc - 1);
    p.incr_cov = {c11 / denom, c12 / denom, c12 / denom, c22 / denom};
    return p;
}

std::array<double, 4> covariance_factor(const std::array<double, 4>& cov) {
    const double a = cov[0];
    const double b = 0.5 * (cov[1] + cov[2]);
    const double c = cov[3];
    if (a > 0.0) {
        const double l11 = std::sqrt(a);
        const double l21 = b / l11;
        const double schur = c - l21 * l21;
        if (schur > 1e-14 * std::max(a, c)) return {l11, 0.0, l21, std::sqrt(schur)};
    }
    // Semidefinite (or numerically so): symmetric square root with clipping.
    Eigen::Matrix2d m;
    m << a, b, b, c;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    const Eigen::Vector2d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::Matrix2d f = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    return {f(0, 0), f(0, 1), f(1, 0), f(1, 1)};
}

ScenarioSet simulate_cbd(const CBDParams& params, IntRange ages, int horizon, std::size_t n_paths,
                         std::uint64_t seed, unsigned threads) {
    if (horizon < 1) throw Error(Errc::HorizonExceeded, "horizon must be >= 1");
    if (n_paths < 1) throw Error(Errc::EmptySample, "need at least one path");
    std::vector<double> offsets;
    for (int a = ages.lo; a <= ages.hi; ++a) {
        const std::size_t row = fitted_row(params.ages, a);
        offsets.push_back(params.ages.lo + static_cast<double>(row) - params.xbar);
    }
    const auto L = covariance_factor(params.incr_cov);
    const std::size_t n_ages = offsets.size();
    const auto h = static_cast<std::size_t>(horizon);
    std::vector<double> q(n_paths * n_ages * h);
    parallel_for(n_paths, threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> k1(h);
        std::vector<double> k2(h);
        for (std::size_t n = b; n < e; ++n) {
            auto eng = path_engine(seed, GeneratorKind::CBD, n);
            std::normal_distribution<double> z(0.0, 1.0);
            double a1 = params.kappa1.back();
            double a2 = params.kappa2.back();
            for (std::size_t s = 0; s < h; ++s) {
                const double z1 = z(eng);
                const double z2 = z(eng);
                a1 += params.drift[0] + L[0] * z1 + L[1] * z2;
                a2 += params.drift[1] + L[2] * z1 + L[3] * z2;
                k1[s] = a1;
                k2[s] = a2;
            }
            for (std::size_t ai = 0; ai < n_ages; ++ai) {
                for (std::size_t s = 0; s < h; ++s) {
                    const double eta = k1[s] + k2[s] * offsets[ai];
                    const double v = 1.0 / (1.0 + std::exp(-eta));
                    q[(n * n_ages + ai) * h + s] = std::min(v, kOneBelowOne);
                }
            }
        }
    });
    return ScenarioSet(GeneratorKind::CBD, seed, params.years.hi, ages, horizon, n_paths,
                       std::move(q));
}

}  // namespace nathedge
