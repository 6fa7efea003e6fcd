#include "nathedge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nathedge/error.hpp"
#include "nathedge/risk.hpp"

namespace nathedge {

namespace {

double cross(const Point2& o, const Point2& p, const Point2& q) noexcept {
    return (p.a - o.a) * (q.l - o.l) - (p.l - o.l) * (q.a - o.a);
}

}  // namespace

std::vector<double> mahalanobis_distances(std::span<const Point2> pts, double ridge) {
    if (pts.size() < 3) {
        throw Error(Errc::DegenerateCovariance, "Mahalanobis distances need at least 3 points");
    }
    const double n = static_cast<double>(pts.size());
    double ma = 0.0, ml = 0.0;
    for (const auto& p : pts) {
        ma += p.a;
        ml += p.l;
    }
    ma /= n;
    ml /= n;
    double saa = 0.0, sal = 0.0, sll = 0.0;
    for (const auto& p : pts) {
        const double da = p.a - ma;
        const double dl = p.l - ml;
        saa += da * da;
        sal += da * dl;
        sll += dl * dl;
    }
    saa = saa / (n - 1.0) + ridge;
    sll = sll / (n - 1.0) + ridge;
    sal /= (n - 1.0);
    const double det = saa * sll - sal * sal;
    const double scale2 = std::max(saa, sll);
    if (!(det > 1e-12 * scale2 * scale2)) {
        throw Error(Errc::DegenerateCovariance, "sample covariance of the pairs is singular");
    }
    // Inverse of [[saa, sal], [sal, sll]].
    const double iaa = sll / det;
    const double ial = -sal / det;
    const double ill = saa / det;
    std::vector<double> d(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double da = pts[i].a - ma;
        const double dl = pts[i].l - ml;
        d[i] = da * da * iaa + 2.0 * da * dl * ial + dl * dl * ill;
    }
    return d;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& x, const Point2& y) {
        return x.a < y.a || (x.a == y.a && x.l < y.l);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) {
        // All points collinear: keep the two extremes.
        return {pts.front(), pts.back()};
    }
    return hull;
}

double polygon_area(std::span<const Point2> poly) noexcept {
    if (poly.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        s += p.a * q.l - q.a * p.l;
    }
    return 0.5 * s;
}

bool polygon_contains(std::span<const Point2> poly, Point2 p, double tol) noexcept {
    if (poly.empty()) return false;
    if (poly.size() == 1) return poly[0] == p;
    if (poly.size() == 2) {
        const double len2 = (poly[1].a - poly[0].a) * (poly[1].a - poly[0].a) +
                            (poly[1].l - poly[0].l) * (poly[1].l - poly[0].l);
        if (std::abs(cross(poly[0], poly[1], p)) > tol * len2) return false;
        const double t = ((p.a - poly[0].a) * (poly[1].a - poly[0].a) +
                          (p.l - poly[0].l) * (poly[1].l - poly[0].l)) / len2;
        return t >= -tol && t <= 1.0 + tol;
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& u = poly[i];
        const auto& v = poly[(i + 1) % poly.size()];
        const double edge2 = (v.a - u.a) * (v.a - u.a) + (v.l - u.l) * (v.l - u.l);
        const double reach = std::abs(p.a - u.a) + std::abs(p.l - u.l) + std::sqrt(edge2);
        if (cross(u, v, p) < -tol * std::sqrt(edge2) * reach) return false;
    }
    return true;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 19; ++k) g.push_back(k / 20.0);
    return g;
}

std::vector<PredictionRegion> build_regions(std::span<const Point2> pts,
                                            std::span<const double> alphas, double ridge) {
    const auto d = mahalanobis_distances(pts, ridge);
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

    std::vector<PredictionRegion> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw Error(Errc::ConfigError, "region level must lie in (0, 1)");
        }
        const std::size_t count = std::clamp<std::size_t>(
            ceil_count(static_cast<double>(pts.size()) * (1.0 - alpha)), 1, pts.size());
        std::vector<Point2> chosen;
        chosen.reserve(count);
        for (std::size_t i = 0; i < count; ++i) chosen.push_back(pts[order[i]]);
        PredictionRegion r;
        r.alpha = alpha;
        r.n_enclosed = count;
        r.vertices = convex_hull(std::move(chosen));
        r.collinear = r.vertices.size() < 3;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace nathedge
