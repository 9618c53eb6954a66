#include "sarplan/scenario.hpp"

#include "sarplan/errors.hpp"
#include "sarplan/io.hpp"

#include <algorithm>
#include <chrono>

#ifndef SARPLAN_VERSION
#define SARPLAN_VERSION "0.1.0"
#endif

namespace sarplan {
namespace {

namespace fs = std::filesystem;

// Runs one pipeline stage, prefixing any failure with the stage name while
// keeping its type (and so the CLI exit code).
template <class F>
decltype(auto) stage(const char* name, F&& f) {
    auto tag = [name](const char* what) { return std::string(name) + ": " + what; };
    try {
        return f();
    } catch (const PlanningFailure& e) {
        throw PlanningFailure(tag(e.what()), e.tree_size());
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(tag(e.what()), e.attempted_jitters());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(tag(e.what()));
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_shared(const fs::path& dir, const ScenarioConfig& config, const ScenarioInputs& in) {
    io::write_json(dir / "meta.json", meta_json(config));
    io::write_grid_csv(dir / "terrain.csv", in.terrain.lattice, in.terrain.heights);
    io::write_grid_pgm(dir / "terrain.pgm", in.terrain.lattice, in.terrain.heights);
    io::write_grid_csv(dir / "heatmap.csv", in.heatmap.lattice, in.heatmap.probs);
    io::write_grid_pgm(dir / "heatmap.pgm", in.heatmap.lattice, in.heatmap.probs);
    for (std::size_t i = 0; i < in.searchers.size(); ++i)
        io::write_searcher_csv(dir / ("searcher_" + std::to_string(i) + ".csv"), in.searchers[i]);
}

void write_uavs(const fs::path& dir, const TrajectorySet& traj) {
    io::write_json(dir / "uav_paths.json", io::trajectories_to_json(traj));
    io::write_trajectory_samples_csv(dir / "uav_samples.csv", traj, 201);
}

std::vector<Observation> observations_of(std::span<const std::vector<Vec3>> polylines, double spacing) {
    std::vector<Observation> obs;
    for (const auto& p : polylines) {
        const auto o = polyline_observations(p, spacing);
        obs.insert(obs.end(), o.begin(), o.end());
    }
    return obs;
}

} // namespace

std::string version_string() { return SARPLAN_VERSION; }

nlohmann::json meta_json(const ScenarioConfig& config) {
    return {{"version", version_string()}, {"config", config_to_json(config)}};
}

ScenarioInputs build_inputs(const ScenarioConfig& config) {
    config.validate();
    ScenarioInputs in;
    in.terrain = stage("terrain", [&] { return generate_terrain(config.seed, config.terrain); });
    in.heatmap = stage("heatmap", [&] {
        return simulate_heatmap(config.lost_person, in.terrain, config.start, config.mc_iterations,
                                rollout_seed(config.seed, 0x4C50)); // separate stream from terrain
    });
    stage("searchers", [&] {
        for (const auto& sector : config.sectors) {
            in.waypoints.push_back(lawnmower_waypoints(sector, config.lawnmower_spacing));
            in.searchers.push_back(simulate_searcher(sector, in.waypoints.back(), config.searcher, in.terrain));
        }
    });
    return in;
}

ObjectiveInputs objective_inputs(const ScenarioConfig& config, const ScenarioInputs& inputs) {
    ObjectiveInputs oi;
    oi.prior = &inputs.heatmap;
    oi.searchers = inputs.searchers;
    oi.gp = config.gp;
    oi.sample_spacing = config.sample_spacing;
    oi.sensor_height_ground = config.sensor_height_ground;
    oi.risk = config.risk;
    oi.config = config.objective;
    if (config.sparse) oi.sparse = config.morton;
    return oi;
}

std::pair<Vec3, Vec3> uav_endpoints(const ScenarioConfig& config, std::size_t uav) {
    const Sector& s = config.sectors.at(uav % config.sectors.size());
    return {{s.entry.x, s.entry.y, config.takeoff_altitude}, {s.exit.x, s.exit.y, config.takeoff_altitude}};
}

namespace {

InitialPaths plan_initial(const ScenarioConfig& config, const ScenarioInputs& inputs, InitialPlanner planner) {
    const auto t0 = std::chrono::steady_clock::now();
    InitialPaths out;
    out.trajectories.band = config.band;
    for (std::size_t u = 0; u < config.uav_count; ++u) {
        RrtRequest req;
        std::tie(req.start, req.goal) = uav_endpoints(config, u);
        req.terrain = &inputs.terrain;
        req.zones = config.zones;
        req.band = config.band;
        req.step = config.rrt_step;
        req.max_nodes = planner == InitialPlanner::Rrt ? config.rrt_max_nodes : config.rrt_star_nodes;
        req.seed = rollout_seed(config.seed, 0x5252 + u);
        auto poly = planner == InitialPlanner::Rrt ? rrt_plan(req) : rrt_star_plan(req);

        // Densify so every Bezier segment sees data even on a two-point path.
        auto dense = resample_polyline(poly, config.rrt_step / 4.0);
        if (!(dense.back() == poly.back())) dense.push_back(poly.back());
        auto fit = fit_to_polyline(dense, config.segments, config.fit_smoothing);
        fit.path.start = req.start;
        fit.path.goal = req.goal;
        out.trajectories.uavs.push_back(std::move(fit.path));
        out.polylines.push_back(std::move(poly));
    }
    out.trajectories.project();
    out.trajectories.validate();
    out.seconds = seconds_since(t0);
    return out;
}

} // namespace

InitialPaths initial_paths(const ScenarioConfig& config, const ScenarioInputs& inputs, InitialPlanner planner) {
    return stage(planner == InitialPlanner::Rrt ? "rrt" : "rrt_star",
                 [&] { return plan_initial(config, inputs, planner); });
}

PlanOutcome run_plan(const ScenarioConfig& config, const fs::path& out_dir) {
    return run_plan(config, build_inputs(config), out_dir);
}

PlanOutcome run_plan(const ScenarioConfig& config, const ScenarioInputs& inputs, const fs::path& out_dir) {
    config.validate();
    const Objective objective = stage("posterior", [&] { return Objective(objective_inputs(config, inputs)); });
    PlanOutcome outcome;
    outcome.trajectories.band = config.band;
    std::vector<std::vector<Vec3>> polylines;

    if (config.uav_count == 0) {
        outcome.posterior = objective.posterior_with({});
        outcome.report.risk = risk_cost(outcome.posterior, config.risk);
        outcome.report.objective = outcome.report.risk;
    } else {
        auto init = initial_paths(config, inputs,
                                  config.init_from == "rrt_star" ? InitialPlanner::RrtStar : InitialPlanner::Rrt);
        polylines = init.polylines;
        const auto t0 = std::chrono::steady_clock::now();
        auto result = stage("optimize", [&] {
            return optimize(init.trajectories, std::cref(objective), config.optimizer, config.zones);
        });
        const double elapsed = seconds_since(t0);
        outcome.trajectories = result.best;
        outcome.report = result.best_report;
        outcome.report.planning_time = elapsed;
        outcome.posterior = objective.posterior_with(
            assemble_observations({}, result.best, config.sample_spacing, config.sensor_height_ground));
        outcome.optimization = std::move(result);
    }

    if (!out_dir.empty()) {
        write_shared(out_dir, config, inputs);
        write_uavs(out_dir, outcome.trajectories);
        if (!polylines.empty()) io::write_polyline_csv(out_dir / "initial_polylines.csv", polylines);
        if (outcome.optimization) io::write_iteration_log_csv(out_dir / "iteration_log.csv", outcome.optimization->log);
        io::write_posterior_csv(out_dir / "posterior.csv", outcome.posterior);
        io::write_json(out_dir / "report.json", io::report_to_json(outcome.report));
    }
    return outcome;
}

ComparisonTable compare_baselines(const ScenarioConfig& config, const fs::path& out_dir) {
    return compare_baselines(config, build_inputs(config), out_dir);
}

ComparisonTable compare_baselines(const ScenarioConfig& config, const ScenarioInputs& inputs,
                                  const fs::path& out_dir) {
    config.validate();
    if (config.uav_count < 1) throw InvalidArgument("compare needs at least one UAV");
    const Objective objective = stage("posterior", [&] { return Objective(objective_inputs(config, inputs)); });
    ComparisonTable table;

    // (a) searchers only
    table.rows.push_back({"No UAVs", objective.risk_with({}), 0.0, std::nullopt});

    // (c) shortest collision-free paths
    const auto star = initial_paths(config, inputs, InitialPlanner::RrtStar);
    const double risk_star = objective.risk_with(observations_of(star.polylines, config.sample_spacing));

    // (b) UAVs retracing searcher tracks at a fixed height
    std::vector<std::vector<Vec3>> manual;
    for (std::size_t u = 0; u < config.uav_count; ++u) {
        std::vector<Vec3> lifted;
        for (const auto& p : inputs.searchers.at(u % inputs.searchers.size()).samples)
            lifted.push_back({p.p.x, p.p.y, config.manual_altitude});
        manual.push_back(std::move(lifted));
    }
    const double risk_manual = objective.risk_with(observations_of(manual, config.sample_spacing));

    table.rows.push_back({"UAVs, RRT*", risk_star, 0.0, star.seconds});
    table.rows.push_back({"UAVs, Manual", risk_manual, 0.0, std::nullopt});

    // (d) risk-optimised
    const bool from_star = config.init_from == "rrt_star";
    const InitialPaths init = from_star ? star : initial_paths(config, inputs, InitialPlanner::Rrt);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = stage("optimize", [&] {
        return optimize(init.trajectories, std::cref(objective), config.optimizer, config.zones);
    });
    const double opt_seconds = seconds_since(t0) + (from_star ? 0.0 : init.seconds);
    table.rows.push_back({"UAVs, Risk", result.best_report.risk, 0.0, opt_seconds});
    table.initial = objective(init.trajectories);

    double max_risk = 0.0;
    for (const auto& r : table.rows) max_risk = std::max(max_risk, r.risk);
    for (auto& r : table.rows) r.pct_of_max = max_risk > 0.0 ? 100.0 * r.risk / max_risk : 0.0;

    if (!out_dir.empty()) {
        write_shared(out_dir / "shared", config, inputs);
        for (const char* row : {"b_manual", "c_rrt_star", "d_risk"}) io::write_json(out_dir / row / "meta.json", meta_json(config));
        io::write_polyline_csv(out_dir / "b_manual" / "uav_polylines.csv", manual);
        io::write_polyline_csv(out_dir / "c_rrt_star" / "uav_polylines.csv", star.polylines);
        write_uavs(out_dir / "d_risk", result.best);
        io::write_iteration_log_csv(out_dir / "d_risk" / "iteration_log.csv", result.log);
        io::write_json(out_dir / "d_risk" / "report.json", io::report_to_json(result.best_report));
        io::write_json(out_dir / "meta.json", meta_json(config));
        write_comparison(out_dir, table);
    }
    table.optimization = std::move(result);
    return table;
}

void write_comparison(const fs::path& dir, const ComparisonTable& table) {
    std::string csv = "scenario,risk_cost,pct_of_max,planning_time\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.3f,", r.scenario.c_str(), r.risk, r.pct_of_max);
        csv += buf;
        if (r.planning_time) {
            std::snprintf(buf, sizeof buf, "%.3f", *r.planning_time);
            csv += buf;
        } else {
            csv += "N/A";
        }
        csv += '\n';
        rows.push_back({{"scenario", r.scenario},
                        {"risk_cost", r.risk},
                        {"pct_of_max", r.pct_of_max},
                        {"planning_time", r.planning_time ? nlohmann::json(*r.planning_time) : nlohmann::json("N/A")}});
    }
    io::write_text(dir / "comparison.csv", csv);
    io::write_json(dir / "comparison.json", rows);
}

} // namespace sarplan
