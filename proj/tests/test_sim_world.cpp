#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "parkbot/errors.hpp"
#include "parkbot/localization.hpp"
#include "parkbot/motion.hpp"
#include "parkbot/random.hpp"
#include "parkbot/sim_world.hpp"

using namespace parkbot;

namespace {

SensorModelParams quiet() {
    SensorModelParams p;
    p.gps_sigma = 0;
    p.plain_gps_sigma = 0;
    p.gyro_bias = 0;
    p.gyro_noise_sd = 0;
    p.odom_noise_frac = 0;
    return p;
}

std::vector<double> radial_errors(GpsMode mode, int n, std::uint64_t seed) {
    const SensorModelParams params;
    Rng rng(seed, 0, Stream::Gps);
    RobotTruth truth;
    truth.pose = {3.0, -4.0, 0.0};
    std::vector<double> r(n);
    for (int k = 0; k < n; ++k)
        r[k] = (sample_gps(truth, params, mode, rng, k).point - truth.pose.position()).norm();
    return r;
}

double fraction_below(const std::vector<double>& v, double x) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double e) { return e < x; })) / v.size();
}

}  // namespace

TEST_CASE("step_truth examples") {
    SUBCASE("north") {
        const auto t = step_truth({}, {1.0, 0.0}, 1.0, {2.0, 1.0});
        CHECK(t.pose.x == doctest::Approx(0.0));
        CHECK(t.pose.y == doctest::Approx(1.0));
    }
    SUBCASE("5 m along the heading") {
        RobotTruth t;
        t.pose.theta = 0.6;
        for (int k = 0; k < 100; ++k) t = step_truth(t, {0.5, 0.0}, 0.1);
        CHECK(t.pose.position().norm() == doctest::Approx(5.0));
        CHECK(bearing(LocalPoint(0, 0), t.pose.position()) == doctest::Approx(0.6));
    }
    SUBCASE("closed circle") {
        RobotTruth t;
        t.pose = {1.0, 2.0, -0.4};
        const int n = 1000;
        for (int k = 0; k < n; ++k) t = step_truth(t, {1.0, 1.0}, 2 * kPi / n, {2.0, 2.0});
        CHECK((t.pose.position() - LocalPoint(1.0, 2.0)).norm() < 1e-9);
        CHECK(std::abs(wrap_angle(t.pose.theta + 0.4)) < 1e-9);
    }
    SUBCASE("one closed-form step equals many") {
        const auto one = step_truth({}, {0.3, 0.7}, 2.0);
        RobotTruth many;
        for (int k = 0; k < 200; ++k) many = step_truth(many, {0.3, 0.7}, 0.01);
        CHECK((one.pose.position() - many.pose.position()).norm() < 1e-12);
    }
}

TEST_CASE("step_truth clamps commands") {
    const auto t = step_truth({}, {3.0, -5.0}, 0.1);
    CHECK(t.v == 0.5);
    CHECK(t.omega == -1.0);
    CHECK(t.pose.theta > -kPi);
    CHECK(t.pose.theta <= kPi);
}

TEST_CASE("gps sampling") {
    RobotTruth truth;
    truth.pose = {1.5, 2.5, 0.0};
    SUBCASE("noise-free fix is the true position") {
        Rng rng(1, 0, Stream::Gps);
        const auto fix = sample_gps(truth, quiet(), GpsMode::Rtk, rng, 3.0);
        CHECK(fix.point == truth.pose.position());
        CHECK(fix.t == 3.0);
    }
    SUBCASE("rtk radial tail") {
        const auto r = radial_errors(GpsMode::Rtk, 10000, 17);
        CHECK(fraction_below(r, 3.5 * 0.01 * std::sqrt(2.0)) >= 0.99);
        std::vector<double> sorted = r;
        std::nth_element(sorted.begin(), sorted.begin() + 5000, sorted.end());
        CHECK(sorted[5000] < 0.015);
    }
    SUBCASE("plain radial 95 percent at 4.9 m") {
        const auto r = radial_errors(GpsMode::Plain, 10000, 18);
        CHECK(std::abs(fraction_below(r, 4.9) - 0.95) <= 0.01);
    }
    SUBCASE("per-axis spread matches sigma") {
        SensorModelParams p;
        Rng rng(4, 0, Stream::Gps);
        double sx = 0, sy = 0;
        const int n = 20000;
        for (int k = 0; k < n; ++k) {
            const LocalPoint d = sample_gps(truth, p, GpsMode::Rtk, rng, k).point - truth.pose.position();
            sx += d.x() * d.x();
            sy += d.y() * d.y();
        }
        CHECK(std::sqrt(sx / n) == doctest::Approx(0.01).epsilon(0.03));
        CHECK(std::sqrt(sy / n) == doctest::Approx(0.01).epsilon(0.03));
    }
}

TEST_CASE("gyro sampling") {
    RobotTruth truth;
    truth.omega = 0.3;
    Rng rng(2, 0, Stream::Gyro);
    CHECK(sample_gyro(truth, quiet(), rng, 0.1) == 0.3);

    SensorModelParams biased = quiet();
    biased.gyro_bias = 0.01;
    truth.omega = 0.0;
    for (int k = 0; k < 10; ++k) CHECK(sample_gyro(truth, biased, rng, 0.1) == 0.01);
}

TEST_CASE("uncorrected gyro bias drifts the heading linearly") {
    SensorModelParams params;
    params.gyro_bias = 0.02;
    Rng rng(8, 0, Stream::Gyro);
    RobotTruth truth;
    PoseEstimate est;
    for (int k = 0; k < 600; ++k) {
        truth = step_truth(truth, {0.148, 0.0}, 0.1);
        est = predict(est, truth.v, sample_gyro(truth, params, rng, 0.1), 0.1);
    }
    CHECK(wrap_angle(est.theta - truth.pose.theta) == doctest::Approx(1.2).epsilon(0.05));
}

TEST_CASE("odometry sampling") {
    RobotTruth truth;
    truth.v = 0.148;
    Rng rng(3, 0, Stream::Odometry);
    CHECK(sample_odometry(truth, quiet(), rng) == 0.148);
    SensorModelParams p;
    double sum = 0;
    for (int k = 0; k < 10000; ++k) sum += sample_odometry(truth, p, rng);
    CHECK(sum / 10000 == doctest::Approx(0.148).epsilon(0.002));
}

TEST_CASE("fix cadence is floor(T / period)") {
    for (const double period : {1.0, 0.5, 0.7, 2.0}) {
        for (const double dt : {0.1, 0.05, 0.02}) {
            const FixSchedule schedule(period, dt);
            for (const long ticks : {1L, 9L, 10L, 11L, 99L, 100L, 1007L, 10000L}) {
                long fixes = 0;
                for (long k = 1; k <= ticks; ++k) fixes += schedule.due(k);
                const double T = ticks * dt;
                CHECK(fixes == static_cast<long>(std::floor(T / period + 1e-9)));
            }
        }
    }
}

TEST_CASE("detection zone geometry") {
    SUBCASE("facing north at the origin") {
        const auto z = detection_zone({});
        CHECK(z.center.isApprox(LocalPoint(0, 0.3)));
        const auto c = z.corners();
        CHECK((c[0] - LocalPoint(-0.15, 0.45)).norm() < 1e-12);
        CHECK((c[1] - LocalPoint(0.15, 0.45)).norm() < 1e-12);
        CHECK((c[2] - LocalPoint(0.15, 0.15)).norm() < 1e-12);
        CHECK((c[3] - LocalPoint(-0.15, 0.15)).norm() < 1e-12);
    }
    SUBCASE("rotates rigidly") {
        RobotTruth t;
        t.pose = {1.0, 1.0, kPi / 2};
        const auto z = detection_zone(t);
        CHECK((z.center - LocalPoint(1.3, 1.0)).norm() < 1e-12);
        const auto c = z.corners();
        CHECK((c[0] - LocalPoint(1.45, 1.15)).norm() < 1e-12);
        CHECK((c[2] - LocalPoint(1.15, 0.85)).norm() < 1e-12);
        CHECK(z.contains(LocalPoint(1.44, 0.86)));
        CHECK_FALSE(z.contains(LocalPoint(1.0, 1.0)));
    }
    SUBCASE("inclusive edges") {
        const auto z = detection_zone({});
        CHECK(z.contains(z.center));
        CHECK(z.contains(LocalPoint(0.15, 0.3)));
        CHECK(z.contains(LocalPoint(-0.15, 0.45)));
        CHECK_FALSE(z.contains(LocalPoint(0.1501, 0.3)));
    }
}

TEST_CASE("trash_in_zone") {
    std::vector<TrashItem> items(4);
    items[0].position = {0.0, 0.3};
    items[1].position = {1.0, 1.3};
    items[2].position = {0.15, 0.2};
    items[3].position = {0.0, 0.35};
    items[3].picked = true;
    const auto hits = trash_in_zone(items, detection_zone({}));
    CHECK(hits == std::vector<std::size_t>{0, 2});
    CHECK(items[0].driven_over);
    CHECK_FALSE(items[1].driven_over);
    CHECK(items[2].driven_over);
    CHECK_FALSE(items[3].driven_over);
}

TEST_CASE("attempt_pickup") {
    Rng rng(5, 0, Stream::Pickup);
    SUBCASE("certain outcomes") {
        for (int k = 0; k < 100; ++k) {
            TrashItem a, b;
            a.detected = b.detected = true;
            CHECK(attempt_pickup(a, 1.0, rng));
            CHECK(a.picked);
            CHECK_FALSE(attempt_pickup(b, 0.0, rng));
            CHECK(b.attempted);
        }
    }
    SUBCASE("binomial rate") {
        int ok = 0;
        for (int k = 0; k < 10000; ++k) {
            TrashItem item;
            item.detected = true;
            ok += attempt_pickup(item, 0.89, rng);
        }
        CHECK(std::abs(ok / 10000.0 - 0.89) <= 0.01);
    }
    SUBCASE("no second attempt") {
        TrashItem item;
        item.detected = true;
        attempt_pickup(item, 0.5, rng);
        CHECK_THROWS_AS(attempt_pickup(item, 0.5, rng), AlreadyAttempted);
    }
}

TEST_CASE("rng streams") {
    Rng a(42, 3, Stream::Gps), b(42, 3, Stream::Gps), c(42, 3, Stream::Gyro), d(42, 4, Stream::Gps);
    bool differs_c = false, differs_d = false;
    for (int k = 0; k < 100; ++k) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        differs_c = differs_c || x != c.uniform();
        differs_d = differs_d || x != d.uniform();
    }
    CHECK(differs_c);
    CHECK(differs_d);
}
