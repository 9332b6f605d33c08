// parkbot: coverage planning and park-cleaning pipeline simulation.
//
//   parkbot plan <scenario> --out path.csv
//   parkbot run <scenario> --seed N --trace trace.csv --metrics metrics.json
//   parkbot sweep <scenario> -n N
//   parkbot calibrate <scenario> --target 0.90
//
// Exit codes: 0 success, 2 validation error, 3 planning error, 4 timeout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "parkbot/errors.hpp"
#include "parkbot/harness.hpp"
#include "parkbot/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPlanning = 3;
constexpr int kExitTimeout = 4;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parkbot::Error("cannot write '" + path + "'");
    return out;
}

void warn_uncovered(const parkbot::CoveragePlan& plan) {
    if (plan.unreachable_megacells > 0 || plan.uncovered_free_cells > 0) {
        std::cerr << "warning: " << plan.uncovered_free_cells << " free cells not covered ("
                  << plan.unreachable_megacells << " megacells outside the start component)\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage planning and park-cleaning pipeline simulation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string trace_path;
    std::string metrics_path;
    int n_runs = 100;
    double target = 0.90;
    int batch = 1000;
    unsigned threads = 0;

    auto* plan_cmd = app.add_subcommand("plan", "Plan the coverage cycle and export waypoints");
    plan_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    plan_cmd->add_option("--out", out_path, "Waypoint CSV output")->required();

    auto* run_cmd = app.add_subcommand("run", "Simulate one run");
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--trace", trace_path, "Per-tick trace CSV output");
    run_cmd->add_option("--metrics", metrics_path, "Metrics JSON output (stdout when omitted)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo batch of independent runs");
    sweep_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("-n", n_runs, "Number of runs")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", seed, "Override the master seed");
    sweep_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* cal_cmd = app.add_subcommand("calibrate", "Fit the detector stub's hit rate to a detection rate");
    cal_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cal_cmd->add_option("--target", target, "Target detection rate given driven-over")->check(CLI::Range(0.0, 1.0));
    cal_cmd->add_option("--batch", batch, "Runs per bisection step")->check(CLI::Range(500, 1000000));
    cal_cmd->add_option("--seed", seed, "Override the master seed");
    cal_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        parkbot::Scenario scn = parkbot::load_scenario(scenario_path);
        if (seed) scn.seed = *seed;

        if (*plan_cmd) {
            const auto plan = parkbot::plan_coverage(scn.boundary, scn.obstacles, scn.start, scn.sim.cell_size);
            warn_uncovered(plan);
            auto out = open_out(out_path);
            parkbot::write_path_csv(out, plan.path, scn.frame);
            std::cout << plan.path.waypoints.size() << " waypoints, " << parkbot::path_length(plan.path)
                      << " m\n";
            return 0;
        }
        if (*run_cmd) {
            parkbot::RunOptions opt;
            opt.record_trace = !trace_path.empty();
            const auto result = parkbot::run(scn, opt);
            if (!trace_path.empty()) {
                auto out = open_out(trace_path);
                parkbot::write_trace_csv(out, result.trace);
            }
            const std::string metrics = parkbot::metrics_to_json(result.metrics);
            if (metrics_path.empty()) {
                std::cout << metrics;
            } else {
                auto out = open_out(metrics_path);
                out << metrics;
            }
            if (result.metrics.timed_out) {
                std::cerr << "timeout after " << result.metrics.elapsed << " s (partial metrics reported)\n";
                return kExitTimeout;
            }
            return 0;
        }
        if (*sweep_cmd) {
            const auto s = parkbot::sweep(scn, n_runs, threads);
            std::cout << parkbot::sweep_to_json(s);
            return 0;
        }
        if (*cal_cmd) {
            parkbot::CalibrationOptions opt;
            opt.batch_runs = batch;
            opt.threads = threads;
            const auto r = parkbot::calibrate_detector(scn, target, opt);
            for (const auto& [p, rate] : r.history) std::cerr << "p_hit=" << p << " detect_rate=" << rate << "\n";
            std::printf("{\"p_hit\": %.6f, \"achieved\": %.4f, \"iterations\": %d, \"saturated\": %s}\n", r.p_hit,
                        r.achieved, r.iterations, r.saturated ? "true" : "false");
            return 0;
        }
    } catch (const parkbot::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const parkbot::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const parkbot::PlanningError& e) {
        std::cerr << "planning error: " << e.what() << "\n";
        return kExitPlanning;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
