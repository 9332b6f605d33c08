#include "parkbot/path_controller.hpp"

#include <algorithm>
#include <cmath>

namespace parkbot {

namespace {

bool collinear_step(const CoveragePath& path, std::size_t k, const LocalPoint& dir) {
    const LocalPoint next = target_waypoint(path, k + 1) - target_waypoint(path, k);
    return (next - dir).norm() <= 1e-9 * std::max(1.0, dir.norm());
}

}  // namespace

LocalPoint target_waypoint(const CoveragePath& path, std::size_t index) {
    return path.waypoints[index % path.waypoints.size()];
}

bool is_pass_through(const CoveragePath& path, std::size_t index) {
    if (index >= path.waypoints.size()) return false;
    const LocalPoint dir = target_waypoint(path, index) - target_waypoint(path, index - 1);
    return collinear_step(path, index, dir);
}

LocalPoint steering_point(const PoseEstimate& est, const CoveragePath& path, const FollowerState& state,
                          const ControlParams& params) {
    const std::size_t n = path.waypoints.size();
    const std::size_t k = state.active_waypoint_index;
    const LocalPoint active = target_waypoint(path, k);
    if (params.lookahead <= 0.0) return active;

    const LocalPoint leg_start = target_waypoint(path, k - 1);
    const LocalPoint step_vec = active - leg_start;
    const double step_len = step_vec.norm();
    if (step_len == 0.0) return active;
    const LocalPoint dir = step_vec / step_len;

    // Last waypoint of the straight run through the active one.
    std::size_t end = k;
    while (end < n && collinear_step(path, end, step_vec)) ++end;
    const double run_len = (target_waypoint(path, end) - leg_start).norm();

    const double along = (est.position() - leg_start).dot(dir);
    const double s = std::clamp(along + params.lookahead, step_len, run_len);
    return leg_start + s * dir;
}

VelocityCommand control(const PoseEstimate& est, const CoveragePath& path, const FollowerState& state,
                        const ControlParams& params) {
    if (state.finished || state.paused_for_pickup || path.waypoints.empty()) return {};
    const LocalPoint target = steering_point(est, path, state, params);
    const double e = wrap_angle(bearing(est.position(), target) - est.theta);
    VelocityCommand cmd;
    cmd.omega = std::clamp(params.k_heading * e, -params.omega_max, params.omega_max);
    cmd.v = std::abs(e) < params.turn_in_place ? params.v_nom : 0.0;
    return cmd;
}

FollowerState advance(const PoseEstimate& est, const CoveragePath& path, const FollowerState& state,
                      const ControlParams& params) {
    FollowerState next = state;
    if (state.finished || path.waypoints.empty()) return next;
    const std::size_t k = state.active_waypoint_index;
    const LocalPoint target = target_waypoint(path, k);
    bool reached = (est.position() - target).norm() < params.waypoint_tol;
    if (!reached && params.lookahead > 0.0 && is_pass_through(path, k)) {
        const LocalPoint dir = (target - target_waypoint(path, k - 1)).normalized();
        const LocalPoint rel = est.position() - target;
        reached = rel.dot(dir) >= 0.0 && std::abs(cross2<double>(dir, rel)) < 0.5 * path.cell_size;
    }
    if (!reached) return next;
    if (k >= path.waypoints.size()) {
        next.finished = true;
    } else {
        ++next.active_waypoint_index;
    }
    return next;
}

}  // namespace parkbot
