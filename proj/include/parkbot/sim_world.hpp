#pragma once
//
// Ground truth for the simulated robot: unicycle kinematics, sensor emulation,
// trash items, the camera's detection zone and pickup outcomes.
//

#include <array>
#include <span>
#include <vector>

#include "parkbot/geo_frame.hpp"
#include "parkbot/localization.hpp"
#include "parkbot/motion.hpp"
#include "parkbot/random.hpp"

namespace parkbot {

struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // compass heading

    LocalPoint position() const { return {x, y}; }
};

struct RobotTruth {
    Pose2 pose;
    double v = 0.0;
    double omega = 0.0;
};

struct ActuatorLimits {
    double v_max = 0.5;      // m/s
    double omega_max = 1.0;  // rad/s
};

enum class GpsMode { Rtk, Plain };

struct SensorModelParams {
    double gps_sigma = 0.01;         // m, RTK
    double gps_period = 1.0;         // s
    double plain_gps_sigma = 2.0;    // m
    double gyro_bias = 0.01;         // rad/s
    double gyro_noise_sd = 0.002;    // rad/s/sqrt(Hz)
    double odom_noise_frac = 0.02;   // relative speed noise
};

struct TrashItem {
    LocalPoint position = LocalPoint::Zero();
    bool driven_over = false;
    bool detected = false;
    bool picked = false;
    bool attempted = false;
};

inline constexpr double kZoneSize = 0.3;
inline constexpr double kZoneOffset = 0.3;

struct DetectionZone {
    LocalPoint center = LocalPoint::Zero();
    double half_size = kZoneSize / 2;
    double heading = 0.0;

    // Boundary-inclusive.
    bool contains(const LocalPoint& p) const;
    // Front-left, front-right, rear-right, rear-left.
    std::array<LocalPoint, 4> corners() const;
};

// Exact unicycle update; commands are clamped to the actuator limits.
RobotTruth step_truth(const RobotTruth& truth, const VelocityCommand& cmd, double dt,
                      const ActuatorLimits& limits = {});

double gps_sigma(const SensorModelParams& params, GpsMode mode);

// Fix = true position + N(0, sigma^2) per axis.
GpsFix sample_gps(const RobotTruth& truth, const SensorModelParams& params, GpsMode mode, Rng& rng, double t);

// Measured rate = true rate + bias + N(0, noise_sd^2 / dt).
double sample_gyro(const RobotTruth& truth, const SensorModelParams& params, Rng& rng, double dt);

double sample_odometry(const RobotTruth& truth, const SensorModelParams& params, Rng& rng);

// Fires on the tick whose end time crosses a multiple of `period`, so a run of
// T seconds yields floor(T / period) fixes.
class FixSchedule {
public:
    FixSchedule(double period, double dt) : period_(period), dt_(dt) {}
    bool due(long tick) const;  // tick >= 1 is the number of completed steps

private:
    double period_;
    double dt_;
};

DetectionZone detection_zone(const RobotTruth& truth, double zone_offset = kZoneOffset,
                             double zone_size = kZoneSize);

// Indices of unpicked items inside the zone; each one is marked driven_over.
std::vector<std::size_t> trash_in_zone(std::span<TrashItem> items, const DetectionZone& zone);

// Bernoulli(q) pickup. Throws AlreadyAttempted on a second call for the same item.
bool attempt_pickup(TrashItem& item, double q, Rng& rng);

}  // namespace parkbot
