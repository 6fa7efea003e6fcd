#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace oracle {

using nathedge::Point2;

double survival(const nathedge::ScenarioSet& sc, std::size_t n, int x, int t) {
    const auto& q = sc.values();
    const std::size_t A = sc.n_ages();
    const auto H = static_cast<std::size_t>(sc.horizon());
    double s = 1.0;
    for (int k = 1; k <= t; ++k) {
        const std::size_t age_idx = static_cast<std::size_t>(x + k - 1 - sc.ages().lo);
        s *= 1.0 - q[n * A * H + age_idx * H + static_cast<std::size_t>(k - 1)];
    }
    return s;
}

double annuity_pv(const nathedge::ScenarioSet& sc, std::size_t n,
                  const nathedge::AnnuityProduct& p, double delta) {
    double v = 0.0;
    for (int k = p.deferral; k < p.deferral + p.n_payments; ++k) {
        v += p.payment * std::exp(-delta * k) * survival(sc, n, p.issue_age, k);
    }
    return v;
}

double insurance_pv(const nathedge::ScenarioSet& sc, std::size_t n,
                    const nathedge::InsuranceProduct& p, double delta) {
    double v = 0.0;
    for (int k = 0; k < p.term; ++k) {
        v += p.benefit * std::exp(-delta * (k + 1)) *
             (survival(sc, n, p.issue_age, k) - survival(sc, n, p.issue_age, k + 1));
    }
    return v;
}

double mean(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s / static_cast<long double>(v.size()));
}

double variance(const std::vector<double>& v) {
    const long double m = mean(v);
    long double s = 0.0L;
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / static_cast<long double>(v.size() - 1));
}

double grid_search_vm(const std::vector<double>& a, const std::vector<double>& i, double lo,
                      double hi, double step) {
    double best_h = lo;
    double best_v = std::numeric_limits<double>::infinity();
    const auto steps = static_cast<long>(std::llround((hi - lo) / step));
    std::vector<double> p(a.size());
    for (long k = 0; k <= steps; ++k) {
        const double h = lo + static_cast<double>(k) * step;
        for (std::size_t n = 0; n < a.size(); ++n) p[n] = a[n] + h * i[n];
        const double v = variance(p);
        if (v < best_v) {
            best_v = v;
            best_h = h;
        }
    }
    return best_h;
}

double order_statistic(std::vector<double> v, std::size_t k) {
    double out = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        auto it = std::min_element(v.begin(), v.end());
        out = *it;
        v.erase(it);
    }
    return out;
}

std::vector<double> mahalanobis(const std::vector<Point2>& pts) {
    const double n = static_cast<double>(pts.size());
    double ma = 0.0, ml = 0.0;
    for (const auto& p : pts) {
        ma += p.a / n;
        ml += p.l / n;
    }
    double c11 = 0.0, c12 = 0.0, c22 = 0.0;
    for (const auto& p : pts) {
        c11 += (p.a - ma) * (p.a - ma) / (n - 1);
        c12 += (p.a - ma) * (p.l - ml) / (n - 1);
        c22 += (p.l - ml) * (p.l - ml) / (n - 1);
    }
    const double l11 = std::sqrt(c11);
    const double l21 = c12 / l11;
    const double l22 = std::sqrt(c22 - l21 * l21);
    std::vector<double> d;
    for (const auto& p : pts) {
        const double z1 = (p.a - ma) / l11;
        const double z2 = ((p.l - ml) - l21 * z1) / l22;
        d.push_back(z1 * z1 + z2 * z2);
    }
    return d;
}

std::vector<Point2> jarvis_hull(const std::vector<Point2>& in) {
    std::vector<Point2> pts = in;
    std::sort(pts.begin(), pts.end(), [](const Point2& x, const Point2& y) {
        return x.a < y.a || (x.a == y.a && x.l < y.l);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const Point2& o, const Point2& p, const Point2& q) {
        return (p.a - o.a) * (q.l - o.l) - (p.l - o.l) * (q.a - o.a);
    };
    auto dist2 = [](const Point2& p, const Point2& q) {
        return (p.a - q.a) * (p.a - q.a) + (p.l - q.l) * (p.l - q.l);
    };
    std::vector<Point2> hull;
    std::size_t start = 0;  // leftmost (then lowest)
    std::size_t cur = start;
    do {
        hull.push_back(pts[cur]);
        std::size_t next = (cur + 1) % pts.size();
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double c = cross(pts[cur], pts[next], pts[j]);
            // Take the most clockwise candidate; on ties the farthest one.
            if (c < 0 || (c == 0 && dist2(pts[cur], pts[j]) > dist2(pts[cur], pts[next]))) {
                next = j;
            }
        }
        cur = next;
    } while (cur != start && hull.size() <= pts.size());
    return hull;
}

bool inside_or_on(const std::vector<Point2>& poly, Point2 p, double tol) {
    const std::size_t n = poly.size();
    // Boundary check first.
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& u = poly[i];
        const Point2& v = poly[(i + 1) % n];
        const double dx = v.a - u.a, dy = v.l - u.l;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0 ? ((p.a - u.a) * dx + (p.l - u.l) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = u.a + t * dx - p.a, ey = u.l + t * dy - p.l;
        if (std::sqrt(ex * ex + ey * ey) <= tol) return true;
    }
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& u = poly[i];
        const Point2& v = poly[(i + 1) % n];
        const double c = (v.a - u.a) * (p.l - u.l) - (p.a - u.a) * (v.l - u.l);
        if (u.l <= p.l) {
            if (v.l > p.l && c > 0) ++winding;
        } else if (v.l <= p.l && c < 0) {
            --winding;
        }
    }
    return winding != 0;
}

std::vector<bool> outcome_predicates(double a, double l, double tol) {
    const double net = a + l;
    const bool perfect = std::abs(net) <= tol;
    const bool surplus = net > 0;
    const bool same = (a >= 0 && l >= 0) || (a <= 0 && l <= 0);
    const bool opposite = (a > 0 && l < 0) || (a < 0 && l > 0);
    const bool less = std::abs(l) < std::abs(a);
    // Order matches nathedge::Outcome.
    return {
        perfect,
        !perfect && opposite && !less && surplus,
        !perfect && opposite && !less && !surplus,
        !perfect && opposite && less && surplus,
        !perfect && opposite && less && !surplus,
        !perfect && same && surplus,
        !perfect && same && !surplus,
    };
}

nathedge::MortalityTable lc_table(nathedge::IntRange ages, nathedge::IntRange years,
                                  const std::vector<double>& alpha,
                                  const std::vector<double>& beta,
                                  const std::vector<double>& kappa) {
    std::vector<double> m;
    for (int a = 0; a < ages.size(); ++a) {
        for (int t = 0; t < years.size(); ++t) {
            m.push_back(std::exp(alpha[static_cast<std::size_t>(a)] +
                                 beta[static_cast<std::size_t>(a)] * kappa[static_cast<std::size_t>(t)]));
        }
    }
    return nathedge::MortalityTable(ages, years, std::move(m));
}

nathedge::MortalityTable cbd_table(nathedge::IntRange ages, nathedge::IntRange years,
                                   const std::vector<double>& k1, const std::vector<double>& k2) {
    const double xbar = 0.5 * (ages.lo + ages.hi);
    std::vector<double> m;
    for (int x = ages.lo; x <= ages.hi; ++x) {
        for (int t = 0; t < years.size(); ++t) {
            const double z = k1[static_cast<std::size_t>(t)] + k2[static_cast<std::size_t>(t)] * (x - xbar);
            const double q = 1.0 / (1.0 + std::exp(-z));
            m.push_back(-std::log(1.0 - q));
        }
    }
    return nathedge::MortalityTable(ages, years, std::move(m));
}

double mc_survival_lc(const nathedge::LCParams& p, const nathedge::KappaPaths& k, int x, int t,
                      double shift) {
    long double acc = 0.0L;
    for (std::size_t n = 0; n < k.n_paths; ++n) {
        double z = 0.0;
        for (int s = 1; s <= t; ++s) {
            const auto row = static_cast<std::size_t>(x + s - 1 - p.ages.lo);
            z += std::exp(p.alpha[row] + p.beta[row] * (k.values[n * static_cast<std::size_t>(k.horizon) +
                                                                 static_cast<std::size_t>(s - 1)] +
                                                        shift));
        }
        acc += std::exp(-z);
    }
    return static_cast<double>(acc / static_cast<long double>(k.n_paths));
}

nathedge::ScenarioSet random_scenario(std::size_t n_paths, nathedge::IntRange ages, int horizon,
                                      double qmax, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, qmax);
    std::vector<double> q(n_paths * static_cast<std::size_t>(ages.size()) *
                          static_cast<std::size_t>(horizon));
    for (auto& v : q) v = u(rng);
    return nathedge::ScenarioSet(nathedge::GeneratorKind::Bootstrap, seed, 2018, ages, horizon,
                                 n_paths, std::move(q));
}

std::string source_path(const std::string& rel) {
    return std::string(NATHEDGE_SOURCE_DIR) + "/" + rel;
}

}  // namespace oracle
