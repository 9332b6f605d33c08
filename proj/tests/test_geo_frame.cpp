#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "parkbot/geo_frame.hpp"

using namespace parkbot;

namespace {

LocalPolygon unit_square() { return make_polygon<double>({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

// Plain even-odd ray cast toward +x, no tolerance.
bool ray_cast(const std::vector<LocalPoint>& v, const LocalPoint& p) {
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const auto& a = v[i];
        const auto& b = v[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x) in = !in;
        }
    }
    return in;
}

// Star-shaped (hence simple) polygon with sorted random angles.
std::vector<LocalPoint> random_star(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nv(3, 12);
    std::uniform_real_distribution<double> radius(0.5, 5.0);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    std::vector<double> angles(nv(rng));
    for (auto& a : angles) a = angle(rng);
    std::sort(angles.begin(), angles.end());
    std::vector<LocalPoint> v;
    for (double a : angles) {
        const double r = radius(rng);
        v.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    return v;
}

}  // namespace

TEST_CASE("geo_to_local closed form") {
    const auto frame = LocalFrame::at({36.9741, -122.0308});
    const LocalPoint o = geo_to_local(frame, frame.origin);
    CHECK(o.norm() == 0.0);

    // pi/180 * R * 1e-5 = 1.1119493 m
    const LocalPoint p = geo_to_local(frame, {36.9741 + 1e-5, -122.0308});
    CHECK(p.x() == 0.0);
    CHECK(std::abs(p.y() - 1.1119493) < 1e-6);
}

TEST_CASE("local_to_geo closed form") {
    const auto frame = LocalFrame::at({10.0, 20.0});
    const GeoPoint o = local_to_geo(frame, {0, 0});
    CHECK(o.lat == 10.0);
    CHECK(o.lon == 20.0);
    const GeoPoint g = local_to_geo(frame, {0, 111.19493});
    CHECK(std::abs(g.lat - 10.001) < 1e-9);
    CHECK(std::abs(g.lon - 20.0) < 1e-12);
}

TEST_CASE("projection round trip within 1 km") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat0(-70, 70), lon0(-179, 179), d(-1000, 1000);
    for (int k = 0; k < 1000; ++k) {
        const auto frame = LocalFrame::at({lat0(rng), lon0(rng)});
        const LocalPoint p(d(rng), d(rng));
        const GeoPoint g = local_to_geo(frame, p);
        const GeoPoint back = local_to_geo(frame, geo_to_local(frame, g));
        CHECK(std::abs(back.lat - g.lat) < 1e-9);
        CHECK(std::abs(back.lon - g.lon) < 1e-9);
        CHECK((geo_to_local(frame, g) - p).norm() < 1e-6);
    }
}

TEST_CASE("projection scales the axes independently") {
    const auto frame = LocalFrame::at({45.0, 7.0});
    const LocalPoint east = geo_to_local(frame, {45.0, 7.001});
    const LocalPoint north = geo_to_local(frame, {45.001, 7.0});
    const double k = std::numbers::pi / 180.0 * kEarthRadius * 1e-3;
    CHECK(east.y() == 0.0);
    CHECK(north.x() == 0.0);
    CHECK(east.x() == doctest::Approx(k * std::cos(std::numbers::pi / 4)).epsilon(1e-9));
    CHECK(north.y() == doctest::Approx(k).epsilon(1e-9));
    const LocalPoint both = geo_to_local(frame, {45.002, 7.003});
    CHECK((both - (2 * north + 3 * east)).norm() < 1e-6);
}

TEST_CASE("point_in_polygon examples") {
    const auto sq = unit_square();
    CHECK(point_in_polygon(sq, LocalPoint(0.5, 0.5)));
    CHECK_FALSE(point_in_polygon(sq, LocalPoint(1.5, 0.5)));
    CHECK(point_in_polygon(sq, LocalPoint(1.0, 0.5)));
    CHECK(point_in_polygon(sq, LocalPoint(0.0, 0.0)));
    CHECK_FALSE(point_in_polygon(sq, LocalPoint(1.0 + 1e-4, 0.5)));
}

TEST_CASE("point_in_polygon agrees with a ray-casting oracle") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> coord(-6, 6);
    int agreed = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto v = random_star(rng);
        const auto poly = make_polygon(v);
        const LocalPoint p(coord(rng), coord(rng));
        if (distance_to_boundary(poly, p) < 1e-6) continue;  // conventions differ only on the boundary
        CHECK(point_in_polygon(poly, p) == ray_cast(v, p));
        ++agreed;
    }
    CHECK(agreed > 990);
}

TEST_CASE("signed area and simplicity") {
    CHECK(signed_area(unit_square()) == doctest::Approx(1.0));
    const auto cw = make_polygon<double>({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(signed_area(cw) == doctest::Approx(-1.0));
    CHECK(is_simple(unit_square()));
    const auto bowtie = make_polygon<double>({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
    CHECK_FALSE(is_simple(bowtie));
}

TEST_CASE("cell_inside examples") {
    const auto field = make_polygon<double>({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
    CHECK(cell_inside(field, LocalPoint(1, 1), 0.3));
    CHECK_FALSE(cell_inside(field, LocalPoint(9.8, 5), 0.3));
    CHECK(cell_inside(field, LocalPoint(0, 0), 0.3));
    CHECK(cell_inside(field, LocalPoint(9.7, 9.7), 0.3));
    CHECK_FALSE(cell_inside(field, LocalPoint(-0.3, 0), 0.3));
}

TEST_CASE("cell_inside rejects a notch that leaves all corners inside") {
    // Thin spike entering the cell from the bottom edge.
    const auto notched = make_polygon<double>(
        {{0, 0}, {0.9, 0}, {0.95, 0.6}, {1.0, 0}, {3, 0}, {3, 3}, {0, 3}});
    CHECK_FALSE(cell_inside(notched, LocalPoint(0.8, 0.0), 0.3));
    CHECK(cell_inside(notched, LocalPoint(1.5, 0.0), 0.3));
}

TEST_CASE("cell_inside implies sampled points are inside") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coord(-5, 5);
    int inside_cells = 0;
    for (int k = 0; k < 400; ++k) {
        const auto poly = make_polygon(random_star(rng));
        const LocalPoint c(coord(rng), coord(rng));
        if (!cell_inside(poly, c, 0.3)) continue;
        ++inside_cells;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                CHECK(point_in_polygon(poly, LocalPoint(c + 0.3 * LocalPoint(a / 4.0, b / 4.0))));
    }
    CHECK(inside_cells > 20);
}

TEST_CASE("polygon_overlaps_cell") {
    const auto obstacle = make_polygon<double>({{0.6, 0.6}, {1.2, 0.6}, {1.2, 1.2}, {0.6, 1.2}});
    CHECK(polygon_overlaps_cell(obstacle, LocalPoint(0.6, 0.6), 0.3));
    CHECK(polygon_overlaps_cell(obstacle, LocalPoint(0.5, 0.5), 0.3));
    CHECK_FALSE(polygon_overlaps_cell(obstacle, LocalPoint(0.3, 0.6), 0.3));  // shares an edge only
    CHECK_FALSE(polygon_overlaps_cell(obstacle, LocalPoint(0.0, 0.0), 0.3));
    const auto tiny = make_polygon<double>({{0.1, 0.1}, {0.2, 0.1}, {0.15, 0.2}});
    CHECK(polygon_overlaps_cell(tiny, LocalPoint(0, 0), 0.3));  // fully contained
}

TEST_CASE("distance_to_segment and distance_to_boundary") {
    CHECK(distance_to_segment<double>({0.5, 1}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(distance_to_segment<double>({2, 0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(distance_to_boundary(unit_square(), LocalPoint(0.5, 0.25)) == doctest::Approx(0.25));
}

TEST_CASE("templated on the scalar type") {
    const auto sq = make_polygon<float>({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(point_in_polygon(sq, Point2<float>(0.5f, 0.5f)));
    CHECK(signed_area(sq) == doctest::Approx(1.0f));
}
