#pragma once
//
// Run orchestration: plan, tick loop, pipeline metrics, trace export, Monte
// Carlo sweeps and detector calibration.
//

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parkbot/coverage_planner.hpp"
#include "parkbot/scenario.hpp"

namespace parkbot {

struct RunMetrics {
    int n_trash = 0;
    int n_driven_over = 0;
    int n_detected = 0;
    int n_picked = 0;
    std::optional<double> rate_nav;
    std::optional<double> rate_detect;
    std::optional<double> rate_pickup;
    std::optional<double> rate_total;
    double elapsed = 0.0;        // s
    double path_length = 0.0;    // m
    double mean_snap = 0.0;      // m
    double rms_crosstrack = 0.0; // m, true position vs planned cycle
    bool timed_out = false;
    int n_fixes = 0;
    int n_corrections = 0;
    int n_triggers = 0;
    double min_boundary_clearance = 0.0;  // m, negative once outside
};

// Fills the four rates from the counts. rate_total is the product of the
// stage rates whenever all are defined, else n_picked / n_trash.
void compute_rates(RunMetrics& m);

struct TraceRow {
    double t = 0.0;
    Pose2 truth;
    Pose2 estimate;
    bool gps_event = false;
    double snap = 0.0;
    bool detect_event = false;
    bool pickup_event = false;
    std::size_t waypoint_index = 0;
};

struct RunOptions {
    std::uint64_t run_index = 0;  // random stream index under the scenario seed
    bool record_trace = true;
    // Replaces the stub classifier; called once per run with the run's
    // detector stream.
    std::function<std::unique_ptr<FrameClassifier>(Rng)> classifier_factory;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<TraceRow> trace;
    CoveragePath path;
};

// Throws PlanningError subclasses when the field cannot be planned. A timeout
// is reported through metrics.timed_out with the partial metrics.
RunResult run(const Scenario& scn, const RunOptions& options = {});

double noiseless_eta(const Scenario& scn, const CoveragePath& path);

// Nearest distance to the closed polyline through a coverage path's cell
// centers, bucketed by cell.
class PathDistanceIndex {
public:
    PathDistanceIndex(const GridMap& grid, const CoveragePath& path);
    double distance(const LocalPoint& p) const;

private:
    const CoveragePath* path_;
    LocalPoint origin_;
    double cell_size_;
    int i0_, j0_, ni_, nj_;
    std::vector<std::vector<int>> buckets_;  // segment ids per cell
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
std::string metrics_to_json(const RunMetrics& m);

struct RateStats {
    int n = 0;            // runs with a defined rate
    double mean = 0.0;
    double sd = 0.0;
    double ci_low = 0.0;  // normal-approximation 95% interval of the mean
    double ci_high = 0.0;
    std::optional<double> pooled;  // ratio of summed counts
};

struct SweepResult {
    int n_runs = 0;
    std::uint64_t master_seed = 0;
    RateStats nav, detect, pickup, total;
    int n_trash = 0, n_driven_over = 0, n_detected = 0, n_picked = 0;
    int timeouts = 0;
    double mean_elapsed = 0.0;
    std::vector<RunMetrics> runs;
};

// Run i uses random stream i under the scenario seed. Runs execute on
// `threads` workers (0 = hardware concurrency); the result does not depend on
// the thread count.
SweepResult sweep(const Scenario& scn, int n_runs, unsigned threads = 0);
std::string sweep_to_json(const SweepResult& s);

struct CalibrationOptions {
    int batch_runs = 1000;
    double tolerance = 0.01;
    int max_iterations = 30;
    unsigned threads = 0;
};

struct CalibrationResult {
    double p_hit = 0.0;
    double achieved = 0.0;  // pooled detected / driven-over at p_hit
    int iterations = 0;
    bool saturated = false;  // target outside the reachable range; clamped
    std::vector<std::pair<double, double>> history;  // (p_hit, achieved)
};

// Bisection on the stub's p_hit over fixed-seed batches. Throws NoConvergence
// after max_iterations.
CalibrationResult calibrate_detector(const Scenario& scn, double target_detect_rate,
                                     const CalibrationOptions& options = {});

}  // namespace parkbot
