#include "parkbot/scenario.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "parkbot/errors.hpp"

namespace parkbot {

using nlohmann::json;

namespace {

GeoPoint read_geo(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("lat_deg") || !j.contains("lon_deg"))
        throw ParseError(field + ": expected {\"lat_deg\": ..., \"lon_deg\": ...}");
    GeoPoint p{j.at("lat_deg").get<double>(), j.at("lon_deg").get<double>()};
    if (!p.valid()) throw ValidationError(field, "latitude/longitude out of range");
    return p;
}

std::vector<GeoPoint> read_geo_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError(field + ": expected an array");
    std::vector<GeoPoint> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(read_geo(j[k], fmt::format("{}[{}]", field, k)));
    return out;
}

json write_geo(const GeoPoint& p) { return {{"lat_deg", p.lat}, {"lon_deg", p.lon}}; }

// Reads an optional key into `value`, leaving the default when absent.
template <typename T>
void read_opt(const json& section, const char* key, T& value) {
    if (section.contains(key)) value = section.at(key).get<T>();
}

void require(bool ok, const std::string& field, const std::string& reason) {
    if (!ok) throw ValidationError(field, reason);
}

// Area centroid in degree space; the projection is affine so it maps to the
// metric centroid.
GeoPoint centroid(const std::vector<GeoPoint>& pts) {
    const GeoPoint ref = pts.front();
    double a2 = 0, cx = 0, cy = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const GeoPoint& p = pts[k];
        const GeoPoint& q = pts[(k + 1) % pts.size()];
        const double x0 = p.lon - ref.lon, y0 = p.lat - ref.lat;
        const double x1 = q.lon - ref.lon, y1 = q.lat - ref.lat;
        const double c = x0 * y1 - x1 * y0;
        a2 += c;
        cx += (x0 + x1) * c;
        cy += (y0 + y1) * c;
    }
    if (a2 == 0.0) return ref;
    return {ref.lat + cy / (3 * a2), ref.lon + cx / (3 * a2)};
}

LocalPolygon to_local(const LocalFrame& frame, const std::vector<GeoPoint>& pts) {
    LocalPolygon poly(2, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) poly.col(static_cast<Eigen::Index>(k)) = geo_to_local(frame, pts[k]);
    return poly;
}

}  // namespace

void finalize_scenario(Scenario& scn) {
    require(scn.boundary_geo.size() >= 3, "boundary", "needs at least 3 vertices");
    scn.frame = LocalFrame::at(centroid(scn.boundary_geo));
    scn.boundary = to_local(scn.frame, scn.boundary_geo);
    require(is_simple(scn.boundary), "boundary", "polygon is self-intersecting or degenerate");

    scn.obstacles.clear();
    for (std::size_t k = 0; k < scn.obstacles_geo.size(); ++k) {
        const std::string field = fmt::format("obstacles[{}]", k);
        require(scn.obstacles_geo[k].size() >= 3, field, "needs at least 3 vertices");
        LocalPolygon poly = to_local(scn.frame, scn.obstacles_geo[k]);
        require(is_simple(poly), field, "polygon is self-intersecting or degenerate");
        for (Eigen::Index v = 0; v < poly.cols(); ++v)
            require(point_in_polygon<double>(scn.boundary, poly.col(v)), field, "vertex outside boundary");
        scn.obstacles.push_back(std::move(poly));
    }

    scn.start = geo_to_local(scn.frame, scn.start_geo);
    require(point_in_polygon(scn.boundary, scn.start), "start", "outside boundary");

    scn.trash.clear();
    for (std::size_t k = 0; k < scn.trash_geo.size(); ++k) {
        const LocalPoint p = geo_to_local(scn.frame, scn.trash_geo[k]);
        require(point_in_polygon(scn.boundary, p), fmt::format("trash[{}]", k), "outside boundary");
        scn.trash.push_back(p);
    }

    const auto& s = scn.sensors;
    require(s.gps_period > 0, "sensors.gps_period_s", "must be positive");
    require(s.gps_sigma >= 0 && s.plain_gps_sigma >= 0 && s.gyro_bias >= 0 && s.gyro_noise_sd >= 0 &&
                s.odom_noise_frac >= 0,
            "sensors", "noise parameters must be non-negative");
    require(scn.detector.stub.valid(), "detector", "need 0 <= p_false <= p_hit <= 1");
    const auto& c = scn.control;
    require(c.v_nom > 0 && c.k_heading > 0 && c.waypoint_tol > 0 && c.omega_max > 0, "control",
            "parameters must be positive");
    require(c.waypoint_tol < scn.sim.cell_size / 2, "control.waypoint_tol_m", "must be below half a cell");
    require(scn.pickup.success_prob >= 0 && scn.pickup.success_prob <= 1, "pickup.success_prob",
            "must be a probability");
    require(scn.pickup.duration >= 0, "pickup.duration_s", "must be non-negative");
    require(scn.sim.dt > 0 && scn.sim.cell_size > 0 && scn.sim.timeout_factor > 0, "sim",
            "dt, cell size and timeout factor must be positive");
}

Scenario parse_scenario(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("malformed scenario: {}", e.what()));
    }
    if (!doc.is_object()) throw ParseError("scenario root must be an object");

    Scenario scn;
    try {
        read_opt(doc, "name", scn.name);
        if (!doc.contains("boundary")) throw ValidationError("boundary", "missing");
        scn.boundary_geo = read_geo_list(doc.at("boundary"), "boundary");
        if (doc.contains("obstacles")) {
            const json& obs = doc.at("obstacles");
            if (!obs.is_array()) throw ParseError("obstacles: expected an array");
            for (std::size_t k = 0; k < obs.size(); ++k)
                scn.obstacles_geo.push_back(read_geo_list(obs[k], fmt::format("obstacles[{}]", k)));
        }
        if (doc.contains("trash")) scn.trash_geo = read_geo_list(doc.at("trash"), "trash");
        if (!doc.contains("start")) throw ValidationError("start", "missing");
        scn.start_geo = read_geo(doc.at("start"), "start");
        read_opt(doc, "seed", scn.seed);

        if (doc.contains("gps_mode")) {
            const auto mode = doc.at("gps_mode").get<std::string>();
            if (mode == "rtk") scn.mode = GpsMode::Rtk;
            else if (mode == "plain") scn.mode = GpsMode::Plain;
            else throw ValidationError("gps_mode", "expected \"rtk\" or \"plain\"");
        }
        if (doc.contains("yaw_correction")) {
            const json& yc = doc.at("yaw_correction");
            if (yc.is_boolean()) {
                scn.localization.yaw_correction = yc.get<bool>();
            } else {
                const auto s = yc.get<std::string>();
                if (s != "on" && s != "off") throw ValidationError("yaw_correction", "expected on|off");
                scn.localization.yaw_correction = s == "on";
            }
        }

        const json empty = json::object();
        auto section = [&](const char* key) -> const json& { return doc.contains(key) ? doc.at(key) : empty; };

        const json& sensors = section("sensors");
        read_opt(sensors, "gps_sigma_m", scn.sensors.gps_sigma);
        read_opt(sensors, "gps_period_s", scn.sensors.gps_period);
        read_opt(sensors, "plain_gps_sigma_m", scn.sensors.plain_gps_sigma);
        read_opt(sensors, "gyro_bias_rad_s", scn.sensors.gyro_bias);
        read_opt(sensors, "gyro_noise_sd_rad_s_rthz", scn.sensors.gyro_noise_sd);
        read_opt(sensors, "odom_noise_frac", scn.sensors.odom_noise_frac);

        const json& det = section("detector");
        read_opt(det, "p_hit", scn.detector.stub.p_hit);
        read_opt(det, "p_false", scn.detector.stub.p_false);
        read_opt(det, "infer_threshold", scn.detector.window.infer_threshold);
        read_opt(det, "trigger_threshold", scn.detector.window.trigger_threshold);
        if (det.contains("trigger_comparison")) {
            const auto s = det.at("trigger_comparison").get<std::string>();
            if (s == "at_least") scn.detector.window.comparison = TriggerComparison::AtLeast;
            else if (s == "greater") scn.detector.window.comparison = TriggerComparison::StrictlyGreater;
            else throw ValidationError("detector.trigger_comparison", "expected at_least|greater");
        }

        const json& ctl = section("control");
        read_opt(ctl, "v_nom_m_s", scn.control.v_nom);
        read_opt(ctl, "k_heading_per_s", scn.control.k_heading);
        read_opt(ctl, "waypoint_tol_m", scn.control.waypoint_tol);
        read_opt(ctl, "omega_max_rad_s", scn.control.omega_max);
        read_opt(ctl, "lookahead_m", scn.control.lookahead);
        read_opt(ctl, "turn_in_place_rad", scn.control.turn_in_place);

        const json& pick = section("pickup");
        read_opt(pick, "success_prob", scn.pickup.success_prob);
        read_opt(pick, "duration_s", scn.pickup.duration);

        const json& loc = section("localization");
        read_opt(loc, "omega_straight_rad_s", scn.localization.omega_straight);
        read_opt(loc, "min_baseline_m", scn.localization.min_baseline);
        if (loc.contains("straight_gate")) {
            const auto g = loc.at("straight_gate").get<std::string>();
            if (g == "per_tick") scn.localization.gate = StraightGate::PerTick;
            else if (g == "fix_interval_mean") scn.localization.gate = StraightGate::FixIntervalMean;
            else throw ValidationError("localization.straight_gate", "expected per_tick|fix_interval_mean");
        }
        if (loc.contains("yaw_reference")) {
            const auto r = loc.at("yaw_reference").get<std::string>();
            if (r == "heading") scn.localization.reference = YawReference::CurrentHeading;
            else if (r == "commanded_course") scn.localization.reference = YawReference::CommandedCourse;
            else throw ValidationError("localization.yaw_reference", "expected heading|commanded_course");
        }

        const json& sim = section("sim");
        read_opt(sim, "dt_s", scn.sim.dt);
        read_opt(sim, "cell_size_m", scn.sim.cell_size);
        read_opt(sim, "zone_offset_m", scn.sim.zone_offset);
        read_opt(sim, "zone_size_m", scn.sim.zone_size);
        read_opt(sim, "timeout_factor", scn.sim.timeout_factor);
        read_opt(sim, "v_max_m_s", scn.sim.v_max);
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("bad value in scenario: {}", e.what()));
    }

    finalize_scenario(scn);
    return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open scenario file '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& scn) {
    json doc;
    if (!scn.name.empty()) doc["name"] = scn.name;
    for (const auto& p : scn.boundary_geo) doc["boundary"].push_back(write_geo(p));
    doc["obstacles"] = json::array();
    for (const auto& obs : scn.obstacles_geo) {
        json poly = json::array();
        for (const auto& p : obs) poly.push_back(write_geo(p));
        doc["obstacles"].push_back(poly);
    }
    doc["trash"] = json::array();
    for (const auto& p : scn.trash_geo) doc["trash"].push_back(write_geo(p));
    doc["start"] = write_geo(scn.start_geo);
    doc["seed"] = scn.seed;
    doc["gps_mode"] = scn.mode == GpsMode::Rtk ? "rtk" : "plain";
    doc["yaw_correction"] = scn.localization.yaw_correction ? "on" : "off";
    doc["sensors"] = {{"gps_sigma_m", scn.sensors.gps_sigma},
                      {"gps_period_s", scn.sensors.gps_period},
                      {"plain_gps_sigma_m", scn.sensors.plain_gps_sigma},
                      {"gyro_bias_rad_s", scn.sensors.gyro_bias},
                      {"gyro_noise_sd_rad_s_rthz", scn.sensors.gyro_noise_sd},
                      {"odom_noise_frac", scn.sensors.odom_noise_frac}};
    doc["detector"] = {{"p_hit", scn.detector.stub.p_hit},
                       {"p_false", scn.detector.stub.p_false},
                       {"infer_threshold", scn.detector.window.infer_threshold},
                       {"trigger_threshold", scn.detector.window.trigger_threshold},
                       {"trigger_comparison", scn.detector.window.comparison == TriggerComparison::AtLeast
                                                  ? "at_least"
                                                  : "greater"}};
    doc["control"] = {{"v_nom_m_s", scn.control.v_nom},
                      {"k_heading_per_s", scn.control.k_heading},
                      {"waypoint_tol_m", scn.control.waypoint_tol},
                      {"omega_max_rad_s", scn.control.omega_max},
                      {"lookahead_m", scn.control.lookahead},
                      {"turn_in_place_rad", scn.control.turn_in_place}};
    doc["pickup"] = {{"success_prob", scn.pickup.success_prob}, {"duration_s", scn.pickup.duration}};
    doc["localization"] = {{"omega_straight_rad_s", scn.localization.omega_straight},
                           {"min_baseline_m", scn.localization.min_baseline},
                           {"straight_gate", scn.localization.gate == StraightGate::PerTick ? "per_tick"
                                                                                            : "fix_interval_mean"},
                           {"yaw_reference", scn.localization.reference == YawReference::CurrentHeading
                                                 ? "heading"
                                                 : "commanded_course"}};
    doc["sim"] = {{"dt_s", scn.sim.dt},
                  {"cell_size_m", scn.sim.cell_size},
                  {"zone_offset_m", scn.sim.zone_offset},
                  {"zone_size_m", scn.sim.zone_size},
                  {"timeout_factor", scn.sim.timeout_factor},
                  {"v_max_m_s", scn.sim.v_max}};
    return doc.dump(2) + "\n";
}

Scenario scenario_from_local(const GeoPoint& anchor, const std::vector<LocalPoint>& boundary,
                             const std::vector<std::vector<LocalPoint>>& obstacles,
                             const std::vector<LocalPoint>& trash, const LocalPoint& start,
                             const Scenario& params_from) {
    Scenario scn = params_from;
    scn.boundary_geo.clear();
    scn.obstacles_geo.clear();
    scn.trash_geo.clear();

    // Convert through the frame the scenario will end up in, so the local
    // geometry survives the round trip up to a pure translation.
    const LocalFrame anchor_frame = LocalFrame::at(anchor);
    std::vector<GeoPoint> provisional;
    for (const auto& p : boundary) provisional.push_back(local_to_geo(anchor_frame, p));
    const GeoPoint center_geo = centroid(provisional);
    const LocalPoint center = geo_to_local(anchor_frame, center_geo);
    const LocalFrame frame = LocalFrame::at(center_geo);
    auto conv = [&](const LocalPoint& p) { return local_to_geo(frame, p - center); };

    for (const auto& p : boundary) scn.boundary_geo.push_back(conv(p));
    for (const auto& obs : obstacles) {
        std::vector<GeoPoint> poly;
        for (const auto& p : obs) poly.push_back(conv(p));
        scn.obstacles_geo.push_back(std::move(poly));
    }
    for (const auto& p : trash) scn.trash_geo.push_back(conv(p));
    scn.start_geo = conv(start);
    finalize_scenario(scn);
    return scn;
}

}  // namespace parkbot
