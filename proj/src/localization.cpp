#include "parkbot/localization.hpp"

#include <cmath>

#include <fmt/format.h>

#include "parkbot/errors.hpp"
#include "parkbot/motion.hpp"

namespace parkbot {

BaselineTooShort::BaselineTooShort(double baseline_m, double min_baseline)
    : Error(fmt::format("fix baseline {:.3f} m is below the {:.3f} m minimum", baseline_m, min_baseline)),
      baseline(baseline_m) {}

PoseEstimate predict(const PoseEstimate& est, double v_meas, double yaw_rate_meas, double dt) {
    const double theta_mid = est.theta + 0.5 * yaw_rate_meas * dt;
    PoseEstimate next;
    next.x = est.x + v_meas * dt * std::sin(theta_mid);
    next.y = est.y + v_meas * dt * std::cos(theta_mid);
    next.theta = wrap_angle(est.theta + yaw_rate_meas * dt);
    next.t = est.t + dt;
    return next;
}

PoseEstimate apply_gps_fix(const PoseEstimate& est, const GpsFix& fix) {
    PoseEstimate next = est;
    next.x = fix.point.x();
    next.y = fix.point.y();
    return next;
}

YawCorrection yaw_correction(const GpsFix& fix_a, const GpsFix& fix_b, double yaw_estimate,
                             double min_baseline) {
    const double baseline = (fix_b.point - fix_a.point).norm();
    if (baseline < min_baseline) throw BaselineTooShort(baseline, min_baseline);
    return {wrap_angle(bearing(fix_a.point, fix_b.point) - yaw_estimate)};
}

SegmentUpdate update_straight_segment(const StraightSegment& seg, double commanded_yaw_rate,
                                      const std::optional<GpsFix>& fix, double yaw_estimate, double t,
                                      const LocalizationParams& params) {
    SegmentUpdate out{seg, std::nullopt};
    if (std::abs(commanded_yaw_rate) >= params.omega_straight) {
        out.segment = StraightSegment{std::nullopt, t, false};
        return out;
    }
    if (!out.segment.active) {
        out.segment.active = true;
        out.segment.straight_since = t;
    }
    if (!fix) return out;
    if (!out.segment.anchor) {
        out.segment.anchor = fix;
        return out;
    }
    if ((fix->point - out.segment.anchor->point).norm() >= params.min_baseline) {
        out.correction = yaw_correction(*out.segment.anchor, *fix, yaw_estimate, params.min_baseline);
        out.segment.anchor = fix;
    }
    return out;
}

Estimator::TickReport Estimator::tick(double v_meas, double yaw_rate_meas, double dt,
                                      double commanded_yaw_rate, const std::optional<GpsFix>& fix) {
    TickReport report;
    estimate_ = predict(estimate_, v_meas, yaw_rate_meas, dt);
    const double mid = commanded_heading_ + 0.5 * commanded_yaw_rate * dt;
    commanded_track_ += v_meas * dt * heading_vector(mid);
    commanded_heading_ += commanded_yaw_rate * dt;
    if (fix) {
        report.snap = (estimate_.position() - fix->point).norm();
        estimate_ = apply_gps_fix(estimate_, *fix);
    }
    double gate_rate = commanded_yaw_rate;
    if (params_.gate == StraightGate::FixIntervalMean) {
        commanded_turn_ += commanded_yaw_rate * dt;
        since_fix_ += dt;
        if (!fix) return report;
        gate_rate = commanded_turn_ / since_fix_;
        commanded_turn_ = 0.0;
        since_fix_ = 0.0;
    }
    double reference = estimate_.theta;
    if (params_.reference == YawReference::CommandedCourse && commanded_track_.norm() > 1e-9)
        reference = estimate_.theta - commanded_heading_ + bearing(LocalPoint::Zero(), commanded_track_);
    auto update = update_straight_segment(segment_, gate_rate, fix, reference, estimate_.t, params_);
    segment_ = update.segment;
    if (!segment_.anchor || (fix && segment_.anchor->t == fix->t)) {
        commanded_heading_ = 0.0;
        commanded_track_ = LocalPoint::Zero();
    }
    if (update.correction && params_.yaw_correction) {
        estimate_.theta = wrap_angle(estimate_.theta + update.correction->delta);
        report.correction = update.correction;
        ++corrections_;
    }
    return report;
}

}  // namespace parkbot
