#pragma once
//
// Geodetic <-> local tangent-plane conversion and the polygon predicates used
// by rasterization and simulation. The local frame is metric: x east, y north.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace parkbot {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using LocalPoint = Point2<double>;

// Vertices are stored column-wise, in order; the closing edge is implicit.
template <typename Scalar>
using Polygon = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

using LocalPolygon = Polygon<double>;

struct GeoPoint {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees

    bool valid() const { return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0; }
};

inline constexpr double kEarthRadius = 6371000.0;

// Equirectangular projection around `origin` on a spherical earth.
struct LocalFrame {
    GeoPoint origin;
    double earth_radius = kEarthRadius;
    double cos_lat0 = 1.0;

    static LocalFrame at(const GeoPoint& origin, double earth_radius = kEarthRadius) {
        return {origin, earth_radius, std::cos(origin.lat * std::numbers::pi / 180.0)};
    }
};

inline LocalPoint geo_to_local(const LocalFrame& frame, const GeoPoint& p) {
    constexpr double deg = std::numbers::pi / 180.0;
    return {(p.lon - frame.origin.lon) * deg * frame.earth_radius * frame.cos_lat0,
            (p.lat - frame.origin.lat) * deg * frame.earth_radius};
}

inline GeoPoint local_to_geo(const LocalFrame& frame, const LocalPoint& p) {
    constexpr double deg = std::numbers::pi / 180.0;
    return {frame.origin.lat + p.y() / (deg * frame.earth_radius),
            frame.origin.lon + p.x() / (deg * frame.earth_radius * frame.cos_lat0)};
}

namespace detail {
template <typename Scalar>
inline constexpr Scalar kGeomEps = Scalar(1e-7);
}

template <typename Scalar>
Scalar cross2(const Point2<Scalar>& a, const Point2<Scalar>& b) {
    return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Scalar distance_to_segment(const Point2<Scalar>& p, const Point2<Scalar>& a, const Point2<Scalar>& b) {
    const Point2<Scalar> ab = b - a;
    const Scalar len2 = ab.squaredNorm();
    if (len2 == Scalar(0)) return (p - a).norm();
    Scalar t = (p - a).dot(ab) / len2;
    t = std::clamp(t, Scalar(0), Scalar(1));
    return (p - (a + t * ab)).norm();
}

// Shoelace area; positive for counterclockwise vertex order.
template <typename Scalar>
Scalar signed_area(const Polygon<Scalar>& poly) {
    Scalar twice = 0;
    const Eigen::Index n = poly.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = (i + 1) % n;
        twice += poly(0, i) * poly(1, j) - poly(0, j) * poly(1, i);
    }
    return twice / Scalar(2);
}

template <typename Scalar>
bool segments_intersect(const Point2<Scalar>& p1, const Point2<Scalar>& p2,
                        const Point2<Scalar>& q1, const Point2<Scalar>& q2) {
    auto orient = [](const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
        const Scalar v = cross2<Scalar>(b - a, c - a);
        return (v > 0) - (v < 0);
    };
    auto on_segment = [](const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
    };
    const int d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const int d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

// At least three vertices, nonzero area and no two non-adjacent edges touching.
template <typename Scalar>
bool is_simple(const Polygon<Scalar>& poly) {
    const Eigen::Index n = poly.cols();
    if (n < 3) return false;
    using std::abs;
    if (abs(signed_area(poly)) <= detail::kGeomEps<Scalar>) return false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point2<Scalar> a = poly.col(i), b = poly.col((i + 1) % n);
        if (a == b) return false;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect<Scalar>(a, b, poly.col(j), poly.col((j + 1) % n))) return false;
        }
    }
    return true;
}

// Boundary-inclusive: points within 1e-7 m of an edge count as inside.
template <typename Scalar>
bool point_in_polygon(const Polygon<Scalar>& poly, const Point2<Scalar>& p) {
    const Eigen::Index n = poly.cols();
    bool inside = false;
    for (Eigen::Index i = 0, j = n - 1; i < n; j = i++) {
        const Point2<Scalar> a = poly.col(i), b = poly.col(j);
        if (distance_to_segment<Scalar>(p, a, b) <= detail::kGeomEps<Scalar>) return true;
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const Scalar x_cross = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside;
}

// True iff the segment a-b meets the open box (lo, hi). Liang-Barsky with
// strict slab constraints.
template <typename Scalar>
bool segment_hits_open_box(const Point2<Scalar>& a, const Point2<Scalar>& b,
                           const Point2<Scalar>& lo, const Point2<Scalar>& hi) {
    Scalar t_lo = -std::numeric_limits<Scalar>::infinity();
    Scalar t_hi = std::numeric_limits<Scalar>::infinity();
    const Point2<Scalar> d = b - a;
    for (int k = 0; k < 2; ++k) {
        if (d[k] == Scalar(0)) {
            if (!(lo[k] < a[k] && a[k] < hi[k])) return false;
            continue;
        }
        Scalar t0 = (lo[k] - a[k]) / d[k];
        Scalar t1 = (hi[k] - a[k]) / d[k];
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
    }
    return t_lo < t_hi && t_lo < Scalar(1) && t_hi > Scalar(0);
}

// The axis-aligned square [cell_min, cell_min + size]^2 lies entirely inside
// `poly` (flush edges allowed).
template <typename Scalar>
bool cell_inside(const Polygon<Scalar>& poly, const Point2<Scalar>& cell_min, Scalar size) {
    const Point2<Scalar> cell_max = cell_min + Point2<Scalar>::Constant(size);
    const Point2<Scalar> corners[4] = {cell_min,
                                       {cell_max.x(), cell_min.y()},
                                       cell_max,
                                       {cell_min.x(), cell_max.y()}};
    for (const auto& c : corners)
        if (!point_in_polygon(poly, c)) return false;
    const Point2<Scalar> shrink = Point2<Scalar>::Constant(detail::kGeomEps<Scalar>);
    const Eigen::Index n = poly.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (segment_hits_open_box<Scalar>(poly.col(i), poly.col((i + 1) % n), cell_min + shrink,
                                          cell_max - shrink))
            return false;
    }
    return true;
}

// Interiors of `poly` and the square overlap. Shared edges do not count.
template <typename Scalar>
bool polygon_overlaps_cell(const Polygon<Scalar>& poly, const Point2<Scalar>& cell_min, Scalar size) {
    const Point2<Scalar> cell_max = cell_min + Point2<Scalar>::Constant(size);
    const Point2<Scalar> shrink = Point2<Scalar>::Constant(detail::kGeomEps<Scalar>);
    const Eigen::Index n = poly.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (segment_hits_open_box<Scalar>(poly.col(i), poly.col((i + 1) % n), cell_min + shrink,
                                          cell_max - shrink))
            return true;
    }
    // No edge crosses the cell, so it is either wholly inside or wholly outside.
    return point_in_polygon<Scalar>(poly, (cell_min + cell_max) / Scalar(2));
}

template <typename Scalar>
Scalar distance_to_boundary(const Polygon<Scalar>& poly, const Point2<Scalar>& p) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    const Eigen::Index n = poly.cols();
    for (Eigen::Index i = 0; i < n; ++i)
        best = std::min(best, distance_to_segment<Scalar>(p, poly.col(i), poly.col((i + 1) % n)));
    return best;
}

template <typename Scalar>
Polygon<Scalar> make_polygon(const std::vector<Point2<Scalar>>& vertices) {
    Polygon<Scalar> poly(2, static_cast<Eigen::Index>(vertices.size()));
    for (std::size_t i = 0; i < vertices.size(); ++i) poly.col(static_cast<Eigen::Index>(i)) = vertices[i];
    return poly;
}

}  // namespace parkbot
