#include "parkbot/sim_world.hpp"

#include <algorithm>
#include <cmath>

#include "parkbot/errors.hpp"

namespace parkbot {

RobotTruth step_truth(const RobotTruth& truth, const VelocityCommand& cmd, double dt,
                      const ActuatorLimits& limits) {
    const double v = std::clamp(cmd.v, -limits.v_max, limits.v_max);
    const double w = std::clamp(cmd.omega, -limits.omega_max, limits.omega_max);
    const double th0 = truth.pose.theta;
    const double th1 = th0 + w * dt;

    RobotTruth next = truth;
    next.v = v;
    next.omega = w;
    if (std::abs(w) > 1e-9) {
        const double r = v / w;
        next.pose.x += r * (std::cos(th0) - std::cos(th1));
        next.pose.y += r * (std::sin(th1) - std::sin(th0));
    } else {
        next.pose.x += v * dt * std::sin(th0);
        next.pose.y += v * dt * std::cos(th0);
    }
    next.pose.theta = wrap_angle(th1);
    return next;
}

double gps_sigma(const SensorModelParams& params, GpsMode mode) {
    return mode == GpsMode::Rtk ? params.gps_sigma : params.plain_gps_sigma;
}

GpsFix sample_gps(const RobotTruth& truth, const SensorModelParams& params, GpsMode mode, Rng& rng, double t) {
    const double sigma = gps_sigma(params, mode);
    GpsFix fix;
    fix.point = truth.pose.position();
    fix.point.x() += rng.normal(sigma);
    fix.point.y() += rng.normal(sigma);
    fix.t = t;
    fix.sigma = sigma;
    return fix;
}

double sample_gyro(const RobotTruth& truth, const SensorModelParams& params, Rng& rng, double dt) {
    return truth.omega + params.gyro_bias + rng.normal(params.gyro_noise_sd / std::sqrt(dt));
}

double sample_odometry(const RobotTruth& truth, const SensorModelParams& params, Rng& rng) {
    return truth.v * (1.0 + rng.normal(params.odom_noise_frac));
}

bool FixSchedule::due(long tick) const {
    if (tick < 1) return false;
    const auto slot = [&](long k) { return std::floor(static_cast<double>(k) * dt_ / period_ + 1e-9); };
    return slot(tick) > slot(tick - 1);
}

bool DetectionZone::contains(const LocalPoint& p) const {
    const LocalPoint forward = heading_vector(heading);
    const LocalPoint right(forward.y(), -forward.x());
    const LocalPoint d = p - center;
    constexpr double eps = 1e-12;
    return std::abs(d.dot(forward)) <= half_size + eps && std::abs(d.dot(right)) <= half_size + eps;
}

std::array<LocalPoint, 4> DetectionZone::corners() const {
    const LocalPoint f = half_size * heading_vector(heading);
    const LocalPoint r(f.y(), -f.x());
    return {center + f - r, center + f + r, center - f + r, center - f - r};
}

DetectionZone detection_zone(const RobotTruth& truth, double zone_offset, double zone_size) {
    DetectionZone zone;
    zone.heading = truth.pose.theta;
    zone.half_size = zone_size / 2;
    zone.center = truth.pose.position() + zone_offset * heading_vector(truth.pose.theta);
    return zone;
}

std::vector<std::size_t> trash_in_zone(std::span<TrashItem> items, const DetectionZone& zone) {
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < items.size(); ++k) {
        TrashItem& item = items[k];
        if (item.picked || !zone.contains(item.position)) continue;
        item.driven_over = true;
        hits.push_back(k);
    }
    return hits;
}

bool attempt_pickup(TrashItem& item, double q, Rng& rng) {
    if (item.attempted) throw AlreadyAttempted();
    item.attempted = true;
    item.picked = rng.bernoulli(q);
    return item.picked;
}

}  // namespace parkbot
