#pragma once
//
// Pose estimation between 1 Hz GPS fixes: dead reckoning on odometry and gyro,
// hard position snap on fix arrival, and heading re-alignment from the bearing
// between two fixes recorded on one straight segment.
//
// Headings are compass bearings: 0 = north, clockwise positive, in (-pi, pi].
//

#include <optional>

#include "parkbot/geo_frame.hpp"

namespace parkbot {

struct PoseEstimate {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double t = 0.0;

    LocalPoint position() const { return {x, y}; }
};

struct GpsFix {
    LocalPoint point = LocalPoint::Zero();
    double t = 0.0;
    double sigma = 0.01;
};

struct StraightSegment {
    std::optional<GpsFix> anchor;
    double straight_since = 0.0;
    bool active = false;
};

struct YawCorrection {
    double delta = 0.0;
};

// How the commanded rate is compared against omega_straight: every tick, or
// as the mean commanded rate over each interval between consecutive fixes.
enum class StraightGate { PerTick, FixIntervalMean };

// Heading the GPS bearing is compared against. CurrentHeading uses the
// estimate at the second fix. CommandedCourse replays the commanded turn rate
// and odometry since the first fix, so the bearing is compared against the
// course the robot was told to drive; on a straight command both coincide.
enum class YawReference { CurrentHeading, CommandedCourse };

struct LocalizationParams {
    double omega_straight = 0.1;  // rad/s, commanded-rate straightness gate
    StraightGate gate = StraightGate::FixIntervalMean;
    double min_baseline = 0.5;    // m
    YawReference reference = YawReference::CommandedCourse;
    bool yaw_correction = true;
};

// Midpoint-heading dead-reckoning step.
PoseEstimate predict(const PoseEstimate& est, double v_meas, double yaw_rate_meas, double dt);

// Replaces the position with the fix; heading is left alone.
PoseEstimate apply_gps_fix(const PoseEstimate& est, const GpsFix& fix);

// delta = wrap(bearing(fix_a -> fix_b) - yaw_estimate). Throws
// BaselineTooShort when the fixes are closer than min_baseline.
YawCorrection yaw_correction(const GpsFix& fix_a, const GpsFix& fix_b, double yaw_estimate,
                             double min_baseline = 1.0);

struct SegmentUpdate {
    StraightSegment segment;
    std::optional<YawCorrection> correction;
};

// Advances the straight-segment tracker by one tick. `t` is the current time
// and `yaw_estimate` the heading the correction is computed against.
SegmentUpdate update_straight_segment(const StraightSegment& seg, double commanded_yaw_rate,
                                      const std::optional<GpsFix>& fix, double yaw_estimate, double t,
                                      const LocalizationParams& params = {});

// Sequential estimator combining the operations above.
class Estimator {
public:
    struct TickReport {
        std::optional<double> snap;  // jump magnitude when a fix arrived
        std::optional<YawCorrection> correction;
    };

    Estimator(const PoseEstimate& initial, const LocalizationParams& params)
        : estimate_(initial), params_(params) {}

    TickReport tick(double v_meas, double yaw_rate_meas, double dt, double commanded_yaw_rate,
                    const std::optional<GpsFix>& fix);

    const PoseEstimate& estimate() const { return estimate_; }
    const StraightSegment& segment() const { return segment_; }
    int corrections_applied() const { return corrections_; }

private:
    PoseEstimate estimate_;
    StraightSegment segment_;
    LocalizationParams params_;
    int corrections_ = 0;
    double commanded_turn_ = 0.0;  // integral of commanded rate since the last fix
    double since_fix_ = 0.0;
    // Commanded heading change and odometry displacement since the anchor fix,
    // in a frame where the anchor heading is 0.
    double commanded_heading_ = 0.0;
    LocalPoint commanded_track_ = LocalPoint::Zero();
};

}  // namespace parkbot
