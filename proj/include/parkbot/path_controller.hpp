#pragma once
//
// Waypoint follower for a closed coverage cycle, driven by the pose estimate.
//
// Target k (1 <= k < N) is waypoints[k]; target N is waypoints[0], which closes
// the cycle. The robot starts on waypoints[0].
//

#include "parkbot/coverage_planner.hpp"
#include "parkbot/localization.hpp"
#include "parkbot/motion.hpp"

namespace parkbot {

struct ControlParams {
    double v_nom = 0.148;     // m/s
    double k_heading = 2.0;   // 1/s
    double waypoint_tol = 0.1;
    double omega_max = 1.0;   // rad/s
    // Carrot distance along a straight run; the carrot never passes the end
    // of the run. 0 steers at the active waypoint itself.
    double lookahead = 0.6;   // m
    double turn_in_place = 0.7853981633974483;  // rad, heading error at which v drops to 0
};

struct FollowerState {
    std::size_t active_waypoint_index = 1;
    bool finished = false;
    bool paused_for_pickup = false;
};

LocalPoint target_waypoint(const CoveragePath& path, std::size_t index);

// Point the heading law steers at: `lookahead` ahead of the estimate's
// projection onto the active leg, clamped between the active waypoint and the
// end of the straight run it belongs to.
LocalPoint steering_point(const PoseEstimate& est, const CoveragePath& path, const FollowerState& state,
                          const ControlParams& params);

// The path continues straight through this target (not a corner).
bool is_pass_through(const CoveragePath& path, std::size_t index);

// Proportional heading law on the steering point; turns in place when it is
// behind.
VelocityCommand control(const PoseEstimate& est, const CoveragePath& path, const FollowerState& state,
                        const ControlParams& params);

// Moves to the next target (at most one per call) once the estimate is inside
// waypoint_tol, or, for pass-through targets with a lookahead, once it has
// passed the target within half a cell of the leg. Finishes on the
// cycle-closing target.
FollowerState advance(const PoseEstimate& est, const CoveragePath& path, const FollowerState& state,
                      const ControlParams& params);

}  // namespace parkbot
