#pragma once
//
// Scenario documents: field geometry in geodetic coordinates plus every
// simulation parameter, stored as JSON with units spelled out in key names.
// Geometry is converted to a local frame anchored at the boundary centroid.
//

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "parkbot/coverage_planner.hpp"
#include "parkbot/detection_decision.hpp"
#include "parkbot/geo_frame.hpp"
#include "parkbot/localization.hpp"
#include "parkbot/path_controller.hpp"
#include "parkbot/sim_world.hpp"

namespace parkbot {

// Stub hit rate that lands the default park scenario at a 0.90 detection
// rate given driven-over (output of `parkbot calibrate --target 0.90`).
inline constexpr double kDefaultPHit = 0.872;

struct DetectorParams {
    ClassifierStub stub{kDefaultPHit, 0.01};
    DecisionWindow::Params window;
};

struct PickupParams {
    double success_prob = 0.89;
    double duration = 5.0;  // s the robot is halted per trigger
};

struct SimParams {
    double dt = 0.1;  // s; also the camera frame period
    double cell_size = kDefaultCellSize;
    double zone_offset = kZoneOffset;
    double zone_size = kZoneSize;
    double timeout_factor = 3.0;  // x noiseless ETA
    double v_max = 0.5;
};

struct Scenario {
    std::string name;

    std::vector<GeoPoint> boundary_geo;
    std::vector<std::vector<GeoPoint>> obstacles_geo;
    std::vector<GeoPoint> trash_geo;
    GeoPoint start_geo;

    LocalFrame frame;
    LocalPolygon boundary;
    std::vector<LocalPolygon> obstacles;
    std::vector<LocalPoint> trash;
    LocalPoint start = LocalPoint::Zero();

    SensorModelParams sensors;
    DetectorParams detector;
    ControlParams control;
    PickupParams pickup;
    LocalizationParams localization;
    SimParams sim;
    GpsMode mode = GpsMode::Rtk;
    std::uint64_t seed = 1;
};

// Throws ParseError on malformed JSON or wrong value types and
// ValidationError naming the offending field otherwise.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

// Serializes back to the document format (geodetic geometry).
std::string scenario_to_json(const Scenario& scn);

// Fills the local geometry from the geodetic lists and checks every
// invariant. Called by parse_scenario; exposed for programmatic scenarios.
void finalize_scenario(Scenario& scn);

// Builds a scenario from local geometry placed around `anchor`, converting to
// geodetic coordinates and finalizing. The frame is re-anchored at the
// boundary centroid, so local coordinates shift by that centroid.
Scenario scenario_from_local(const GeoPoint& anchor, const std::vector<LocalPoint>& boundary,
                             const std::vector<std::vector<LocalPoint>>& obstacles,
                             const std::vector<LocalPoint>& trash, const LocalPoint& start,
                             const Scenario& params_from = {});

}  // namespace parkbot
