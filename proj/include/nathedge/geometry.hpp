#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nathedge {

/// A realisation in the (annuity, calibrated insurance) plane.
struct Point2 {
    double a = 0.0;
    double l = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Squared Mahalanobis distance of each point to the sample mean, using the
/// N - 1 sample covariance plus an optional ridge term on the diagonal.
std::vector<double> mahalanobis_distances(std::span<const Point2> pts, double ridge = 0.0);

/// Monotone-chain convex hull, counterclockwise, without repeated or
/// collinear vertices. Fewer than three distinct non-collinear inputs yield
/// the degenerate hull (one point or the two extreme points).
std::vector<Point2> convex_hull(std::vector<Point2> pts);

double polygon_area(std::span<const Point2> poly) noexcept;

/// Inside-or-on test for a counterclockwise convex polygon. `tol` is a
/// relative slack on the edge cross products.
bool polygon_contains(std::span<const Point2> poly, Point2 p, double tol = 1e-9) noexcept;

/// Joint prediction region J_alpha: hull of the ceil(N(1 - alpha))
/// realisations closest to the mean in Mahalanobis distance.
struct PredictionRegion {
    double alpha = 0.0;
    std::vector<Point2> vertices;
    std::size_t n_enclosed = 0;
    /// Set when the selected points are collinear and the hull is a segment.
    bool collinear = false;
};

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_alpha_grid();

/// One region per alpha, in the order given. Distance ties are broken by
/// path index.
std::vector<PredictionRegion> build_regions(std::span<const Point2> pts,
                                            std::span<const double> alphas, double ridge = 0.0);

}  // namespace nathedge
