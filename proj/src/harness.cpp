#include "parkbot/harness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "parkbot/errors.hpp"

namespace parkbot {

void compute_rates(RunMetrics& m) {
    auto ratio = [](int num, int den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.rate_nav = ratio(m.n_driven_over, m.n_trash);
    m.rate_detect = ratio(m.n_detected, m.n_driven_over);
    m.rate_pickup = ratio(m.n_picked, m.n_detected);
    if (m.rate_nav && m.rate_detect && m.rate_pickup)
        m.rate_total = *m.rate_nav * *m.rate_detect * *m.rate_pickup;
    else
        m.rate_total = ratio(m.n_picked, m.n_trash);
}

PathDistanceIndex::PathDistanceIndex(const GridMap& grid, const CoveragePath& path)
    : path_(&path), origin_(grid.origin), cell_size_(grid.cell_size) {
    int i1 = std::numeric_limits<int>::min(), j1 = i1;
    i0_ = j0_ = std::numeric_limits<int>::max();
    for (const auto& c : path.cells) {
        i0_ = std::min(i0_, c.i), j0_ = std::min(j0_, c.j);
        i1 = std::max(i1, c.i), j1 = std::max(j1, c.j);
    }
    ni_ = path.cells.empty() ? 0 : i1 - i0_ + 1;
    nj_ = path.cells.empty() ? 0 : j1 - j0_ + 1;
    buckets_.resize(static_cast<std::size_t>(ni_) * static_cast<std::size_t>(nj_));
    const std::size_t n = path.cells.size();
    for (std::size_t k = 0; k < n; ++k) {
        for (const CellIndex& c : {path.cells[k], path.cells[(k + 1) % n]}) {
            auto& bucket = buckets_[static_cast<std::size_t>((c.i - i0_) * nj_ + (c.j - j0_))];
            if (bucket.empty() || bucket.back() != static_cast<int>(k)) bucket.push_back(static_cast<int>(k));
        }
    }
}

double PathDistanceIndex::distance(const LocalPoint& p) const {
    const std::size_t n = path_->waypoints.size();
    if (n == 0) return std::numeric_limits<double>::infinity();
    if (n == 1) return (p - path_->waypoints[0]).norm();

    const LocalPoint rel = (p - origin_) / cell_size_;
    const int ci = static_cast<int>(std::floor(rel.x()));
    const int cj = static_cast<int>(std::floor(rel.y()));
    const int reach = std::max({std::abs(ci - i0_), std::abs(ci - (i0_ + ni_ - 1)), std::abs(cj - j0_),
                                std::abs(cj - (j0_ + nj_ - 1))});

    double best = std::numeric_limits<double>::infinity();
    auto visit = [&](int i, int j) {
        if (i < i0_ || j < j0_ || i >= i0_ + ni_ || j >= j0_ + nj_) return;
        for (int k : buckets_[static_cast<std::size_t>((i - i0_) * nj_ + (j - j0_))]) {
            const LocalPoint& a = path_->waypoints[static_cast<std::size_t>(k)];
            const LocalPoint& b = path_->waypoints[(static_cast<std::size_t>(k) + 1) % n];
            best = std::min(best, distance_to_segment<double>(p, a, b));
        }
    };
    for (int ring = 0; ring <= reach + 1; ++ring) {
        if (ring == 0) {
            visit(ci, cj);
        } else {
            for (int d = -ring; d <= ring; ++d) {
                visit(ci + d, cj + ring);
                visit(ci + d, cj - ring);
            }
            for (int d = -ring + 1; d <= ring - 1; ++d) {
                visit(ci + ring, cj + d);
                visit(ci - ring, cj + d);
            }
        }
        // Segments bucketed in later rings reach no closer than (ring - 1) cells.
        if (best <= (ring - 1) * cell_size_) break;
    }
    return best;
}

double noiseless_eta(const Scenario& scn, const CoveragePath& path) {
    return path_length(path) / scn.control.v_nom + static_cast<double>(scn.trash.size()) * scn.pickup.duration;
}

namespace {

Pose2 to_pose(const PoseEstimate& e) { return {e.x, e.y, e.theta}; }

double signed_clearance(const LocalPolygon& boundary, const LocalPoint& p) {
    const double d = distance_to_boundary(boundary, p);
    return point_in_polygon(boundary, p) ? d : -d;
}

}  // namespace

RunResult run(const Scenario& scn, const RunOptions& options) {
    const CoveragePlan plan = plan_coverage(scn.boundary, scn.obstacles, scn.start, scn.sim.cell_size);
    RunResult result;
    result.path = plan.path;
    const CoveragePath& path = result.path;
    const PathDistanceIndex crosstrack(plan.grid, path);

    Rng gps_rng(scn.seed, options.run_index, Stream::Gps);
    Rng gyro_rng(scn.seed, options.run_index, Stream::Gyro);
    Rng odom_rng(scn.seed, options.run_index, Stream::Odometry);
    Rng pickup_rng(scn.seed, options.run_index, Stream::Pickup);
    Rng detector_rng(scn.seed, options.run_index, Stream::Detector);
    std::unique_ptr<FrameClassifier> classifier =
        options.classifier_factory ? options.classifier_factory(std::move(detector_rng))
                                   : std::make_unique<StubClassifier>(scn.detector.stub, std::move(detector_rng));

    const LocalPoint start = path.waypoints.front();
    const double heading0 = path.waypoints.size() > 1 ? bearing(start, path.waypoints[1]) : 0.0;
    RobotTruth truth;
    truth.pose = {start.x(), start.y(), heading0};
    Estimator estimator({start.x(), start.y(), heading0, 0.0}, scn.localization);

    std::vector<TrashItem> items;
    for (const auto& p : scn.trash) items.push_back({p});

    DecisionWindow window(scn.detector.window);
    FollowerState follower;
    const FixSchedule fixes(scn.sensors.gps_period, scn.sim.dt);
    const ActuatorLimits limits{scn.sim.v_max, scn.control.omega_max};
    const double timeout = scn.sim.timeout_factor * noiseless_eta(scn, path);

    RunMetrics& m = result.metrics;
    m.path_length = path_length(path);
    m.min_boundary_clearance = signed_clearance(scn.boundary, truth.pose.position());
    double snap_sum = 0.0, crosstrack_sq = 0.0;
    long ticks = 0;
    double pause_until = 0.0;

    for (long k = 1;; ++k) {
        const double t = static_cast<double>(k) * scn.sim.dt;
        TraceRow row;
        row.t = t;

        const VelocityCommand cmd = control(estimator.estimate(), path, follower, scn.control);
        truth = step_truth(truth, cmd, scn.sim.dt, limits);
        const double v_meas = sample_odometry(truth, scn.sensors, odom_rng);
        const double w_meas = sample_gyro(truth, scn.sensors, gyro_rng, scn.sim.dt);
        std::optional<GpsFix> fix;
        if (fixes.due(k)) fix = sample_gps(truth, scn.sensors, scn.mode, gps_rng, t);

        const auto report = estimator.tick(v_meas, w_meas, scn.sim.dt, cmd.omega, fix);
        if (report.snap) {
            row.gps_event = true;
            row.snap = *report.snap;
            snap_sum += *report.snap;
            ++m.n_fixes;
        }

        if (follower.paused_for_pickup && t >= pause_until - 1e-9) {
            follower.paused_for_pickup = false;
            window.clear();
        }
        if (!follower.paused_for_pickup) {
            const DetectionZone zone = detection_zone(truth, scn.sim.zone_offset, scn.sim.zone_size);
            const auto hits = trash_in_zone(items, zone);
            const double prob = classifier->classify({!hits.empty(), t});
            if (window.push(prob)) {
                row.detect_event = true;
                ++m.n_triggers;
                for (std::size_t h : hits) {
                    TrashItem& item = items[h];
                    if (item.attempted) continue;
                    item.detected = true;
                    if (attempt_pickup(item, scn.pickup.success_prob, pickup_rng)) row.pickup_event = true;
                }
                follower.paused_for_pickup = true;
                pause_until = t + scn.pickup.duration;
            }
        }
        if (!follower.paused_for_pickup) follower = advance(estimator.estimate(), path, follower, scn.control);

        const double xt = crosstrack.distance(truth.pose.position());
        crosstrack_sq += xt * xt;
        m.min_boundary_clearance =
            std::min(m.min_boundary_clearance, signed_clearance(scn.boundary, truth.pose.position()));
        ++ticks;

        if (options.record_trace) {
            row.truth = truth.pose;
            row.estimate = to_pose(estimator.estimate());
            row.waypoint_index = follower.active_waypoint_index;
            result.trace.push_back(row);
        }
        m.elapsed = t;
        if (follower.finished) break;
        if (t >= timeout) {
            m.timed_out = true;
            break;
        }
    }

    m.n_trash = static_cast<int>(items.size());
    for (const auto& item : items) {
        m.n_driven_over += item.driven_over;
        m.n_detected += item.detected;
        m.n_picked += item.picked;
    }
    m.n_corrections = estimator.corrections_applied();
    m.mean_snap = m.n_fixes ? snap_sum / m.n_fixes : 0.0;
    m.rms_crosstrack = ticks ? std::sqrt(crosstrack_sq / static_cast<double>(ticks)) : 0.0;
    compute_rates(m);
    return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << "t_s,true_x_m,true_y_m,true_theta_rad,est_x_m,est_y_m,est_theta_rad,gps_event,snap_m,"
           "detect_event,pickup_event,waypoint_index\n";
    for (const auto& r : trace) {
        out << fmt::format("{:.1f},{:.4f},{:.4f},{:.6f},{:.4f},{:.4f},{:.6f},{},{:.4f},{},{},{}\n", r.t, r.truth.x,
                           r.truth.y, r.truth.theta, r.estimate.x, r.estimate.y, r.estimate.theta,
                           int(r.gps_event), r.snap, int(r.detect_event), int(r.pickup_event),
                           r.waypoint_index);
    }
}

namespace {

std::string rate_str(const std::optional<double>& r) { return r ? fmt::format("{:.4f}", *r) : "null"; }

}  // namespace

std::string metrics_to_json(const RunMetrics& m) {
    std::string s = "{\n";
    s += fmt::format("  \"n_trash\": {},\n", m.n_trash);
    s += fmt::format("  \"n_driven_over\": {},\n", m.n_driven_over);
    s += fmt::format("  \"n_detected\": {},\n", m.n_detected);
    s += fmt::format("  \"n_picked\": {},\n", m.n_picked);
    s += fmt::format("  \"rate_nav\": {},\n", rate_str(m.rate_nav));
    s += fmt::format("  \"rate_detect\": {},\n", rate_str(m.rate_detect));
    s += fmt::format("  \"rate_pickup\": {},\n", rate_str(m.rate_pickup));
    s += fmt::format("  \"rate_total\": {},\n", rate_str(m.rate_total));
    s += fmt::format("  \"elapsed\": {:.4f},\n", m.elapsed);
    s += fmt::format("  \"path_length\": {:.4f},\n", m.path_length);
    s += fmt::format("  \"mean_snap\": {:.4f},\n", m.mean_snap);
    s += fmt::format("  \"rms_crosstrack\": {:.4f},\n", m.rms_crosstrack);
    s += fmt::format("  \"timed_out\": {},\n", m.timed_out);
    s += fmt::format("  \"n_fixes\": {},\n", m.n_fixes);
    s += fmt::format("  \"n_corrections\": {},\n", m.n_corrections);
    s += fmt::format("  \"n_triggers\": {},\n", m.n_triggers);
    s += fmt::format("  \"min_boundary_clearance\": {:.4f}\n", m.min_boundary_clearance);
    s += "}\n";
    return s;
}

namespace {

RateStats rate_stats(const std::vector<RunMetrics>& runs, std::optional<double> RunMetrics::*field, int num,
                     int den) {
    RateStats st;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& r : runs) {
        if (!(r.*field)) continue;
        const double v = *(r.*field);
        ++st.n;
        sum += v;
        sum_sq += v * v;
    }
    if (st.n > 0) {
        st.mean = sum / st.n;
        st.sd = st.n > 1 ? std::sqrt(std::max(0.0, (sum_sq - st.n * st.mean * st.mean) / (st.n - 1))) : 0.0;
        const double half = 1.96 * st.sd / std::sqrt(static_cast<double>(st.n));
        st.ci_low = st.mean - half;
        st.ci_high = st.mean + half;
    }
    if (den > 0) st.pooled = static_cast<double>(num) / den;
    return st;
}

// Runs job(i) for i in [0, n) on a small worker pool.
template <typename Job>
void parallel_for(int n, unsigned threads, Job job) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(n, 1)));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < n && !failed; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepResult sweep(const Scenario& scn, int n_runs, unsigned threads) {
    if (n_runs < 1) throw std::invalid_argument("sweep needs at least one run");
    SweepResult s;
    s.n_runs = n_runs;
    s.master_seed = scn.seed;
    s.runs.resize(static_cast<std::size_t>(n_runs));
    parallel_for(n_runs, threads, [&](int i) {
        RunOptions opt;
        opt.run_index = static_cast<std::uint64_t>(i);
        opt.record_trace = false;
        try {
            s.runs[static_cast<std::size_t>(i)] = run(scn, opt).metrics;
        } catch (const Error& e) {
            throw Error(fmt::format("run {}: {}", i, e.what()));
        }
    });

    double elapsed = 0.0;
    for (const auto& r : s.runs) {
        s.n_trash += r.n_trash;
        s.n_driven_over += r.n_driven_over;
        s.n_detected += r.n_detected;
        s.n_picked += r.n_picked;
        s.timeouts += r.timed_out;
        elapsed += r.elapsed;
    }
    s.mean_elapsed = elapsed / n_runs;
    s.nav = rate_stats(s.runs, &RunMetrics::rate_nav, s.n_driven_over, s.n_trash);
    s.detect = rate_stats(s.runs, &RunMetrics::rate_detect, s.n_detected, s.n_driven_over);
    s.pickup = rate_stats(s.runs, &RunMetrics::rate_pickup, s.n_picked, s.n_detected);
    s.total = rate_stats(s.runs, &RunMetrics::rate_total, s.n_picked, s.n_trash);
    return s;
}

std::string sweep_to_json(const SweepResult& s) {
    auto stats = [](const char* name, const RateStats& r, bool last) {
        return fmt::format(
            "    \"{}\": {{\"n\": {}, \"mean\": {:.4f}, \"sd\": {:.4f}, \"ci95\": [{:.4f}, {:.4f}], \"pooled\": {}}}{}\n",
            name, r.n, r.mean, r.sd, r.ci_low, r.ci_high, rate_str(r.pooled), last ? "" : ",");
    };
    std::string out = "{\n";
    out += fmt::format("  \"n_runs\": {},\n", s.n_runs);
    out += fmt::format("  \"master_seed\": {},\n", s.master_seed);
    out += fmt::format("  \"n_trash\": {},\n  \"n_driven_over\": {},\n  \"n_detected\": {},\n  \"n_picked\": {},\n",
                       s.n_trash, s.n_driven_over, s.n_detected, s.n_picked);
    out += fmt::format("  \"timeouts\": {},\n", s.timeouts);
    out += fmt::format("  \"mean_elapsed\": {:.4f},\n", s.mean_elapsed);
    out += "  \"rates\": {\n";
    out += stats("rate_nav", s.nav, false);
    out += stats("rate_detect", s.detect, false);
    out += stats("rate_pickup", s.pickup, false);
    out += stats("rate_total", s.total, true);
    out += "  }\n}\n";
    return out;
}

CalibrationResult calibrate_detector(const Scenario& scn, double target, const CalibrationOptions& options) {
    if (!(target >= 0.0 && target <= 1.0)) throw std::invalid_argument("target detection rate must be in [0, 1]");
    if (options.batch_runs < 1) throw std::invalid_argument("calibration batch must contain runs");

    CalibrationResult result;
    Scenario trial = scn;
    // Same seeds every evaluation, so the achieved rate is a near-monotone
    // function of p_hit.
    auto achieved = [&](double p_hit) {
        trial.detector.stub.p_hit = p_hit;
        const SweepResult s = sweep(trial, options.batch_runs, options.threads);
        const double rate = s.detect.pooled.value_or(0.0);
        result.history.emplace_back(p_hit, rate);
        return rate;
    };
    auto done = [&](double p, double rate, bool saturated) {
        result.p_hit = p;
        result.achieved = rate;
        result.saturated = saturated;
        return result;
    };

    double lo = scn.detector.stub.p_false, hi = 1.0;
    const double f_hi = achieved(hi);
    if (std::abs(f_hi - target) < options.tolerance || target >= f_hi) return done(hi, f_hi, target > f_hi + options.tolerance);
    const double f_lo = achieved(lo);
    if (std::abs(f_lo - target) < options.tolerance || target <= f_lo) return done(lo, f_lo, target < f_lo - options.tolerance);

    for (int it = 1; it <= options.max_iterations; ++it) {
        result.iterations = it;
        const double mid = 0.5 * (lo + hi);
        const double f = achieved(mid);
        if (std::abs(f - target) < options.tolerance) return done(mid, f, false);
        (f < target ? lo : hi) = mid;
    }
    throw NoConvergence(fmt::format("detector calibration did not reach {:.4f} within {} iterations", target,
                                    options.max_iterations));
}

}  // namespace parkbot
