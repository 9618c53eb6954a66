#pragma once

#include "sarplan/lost_person.hpp"
#include "sarplan/planner.hpp"
#include "sarplan/risk_objective.hpp"
#include "sarplan/searcher.hpp"
#include "sarplan/sensing_gp.hpp"
#include "sarplan/terrain.hpp"
#include "sarplan/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace sarplan {

struct ScenarioConfig {
    std::uint64_t seed = 7;
    TerrainParams terrain;

    LostPersonParams lost_person;
    StartDistribution start{{200.0, 200.0}, 30.0, {0.0, 0.0}};
    std::size_t mc_iterations = 25000;

    std::vector<Sector> sectors;
    double lawnmower_spacing = 40.0;
    SearcherParams searcher;

    std::size_t uav_count = 2;
    std::size_t segments = 4;
    AltitudeBand band{5.0, 60.0};
    double takeoff_altitude = 10.0;
    double manual_altitude = 15.0;

    GibbsKernelParams gp;
    double sample_spacing = 10.0;
    double sensor_height_ground = 1.7;
    RiskParams risk;
    ObjectiveConfig objective;
    OptimizerConfig optimizer;

    double rrt_step = 10.0;
    std::size_t rrt_max_nodes = 3000;
    std::size_t rrt_star_nodes = 3000;
    // "rrt" (default) or "rrt_star": which planner seeds the optimizer.
    std::string init_from = "rrt";
    // Second-difference penalty used when fitting Bezier curves to planner
    // polylines; 0 gives the plain least-squares fit.
    double fit_smoothing = 1e-2;

    bool sparse = false;
    MortonConfig morton;

    std::vector<NoFlyZone> zones;
    std::string output_dir = "out";

    // Throws InvalidArgument naming the first broken field.
    void validate() const;
};

// 400 m x 400 m at 10 m cells, 25000 rollouts, two half-area sectors.
ScenarioConfig default_config();
// 200 m x 200 m at 10 m cells, 2000 rollouts, 150 optimizer iterations.
ScenarioConfig desk_config();

nlohmann::json config_to_json(const ScenarioConfig& config);
// Fields missing from `j` keep their value in `base`.
ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioConfig base = default_config());

// Inputs every scenario row shares.
struct ScenarioInputs {
    TerrainGrid terrain;
    BeliefGrid heatmap;
    std::vector<std::vector<Vec2>> waypoints;
    std::vector<SearcherPath> searchers;
};

ScenarioInputs build_inputs(const ScenarioConfig& config);
ObjectiveInputs objective_inputs(const ScenarioConfig& config, const ScenarioInputs& inputs);

// UAV i flies sector (i mod sectors) from entry to exit at takeoff altitude.
std::pair<Vec3, Vec3> uav_endpoints(const ScenarioConfig& config, std::size_t uav);

enum class InitialPlanner { Rrt, RrtStar };

struct InitialPaths {
    std::vector<std::vector<Vec3>> polylines;
    TrajectorySet trajectories;
    double seconds = 0.0;
};

InitialPaths initial_paths(const ScenarioConfig& config, const ScenarioInputs& inputs, InitialPlanner planner);

struct PlanOutcome {
    RiskReport report;
    std::optional<OptimizeResult> optimization;
    TrajectorySet trajectories;
    GPPosterior posterior;
};

// terrain -> heatmap -> searchers -> RRT -> Bezier fit -> optimize -> report.
// Writes artifacts into `out_dir` unless it is empty.
PlanOutcome run_plan(const ScenarioConfig& config, const std::filesystem::path& out_dir);
PlanOutcome run_plan(const ScenarioConfig& config, const ScenarioInputs& inputs,
                     const std::filesystem::path& out_dir);

struct ComparisonRow {
    std::string scenario;
    double risk = 0.0;
    double pct_of_max = 0.0;
    std::optional<double> planning_time;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows; // no UAVs, RRT*, manual, risk-optimised
    RiskReport initial;              // optimizer start of the risk-optimised row
    std::optional<OptimizeResult> optimization;
};

ComparisonTable compare_baselines(const ScenarioConfig& config, const std::filesystem::path& out_dir);
ComparisonTable compare_baselines(const ScenarioConfig& config, const ScenarioInputs& inputs,
                                  const std::filesystem::path& out_dir);

void write_comparison(const std::filesystem::path& dir, const ComparisonTable& table);

// git-describe style string baked in at configure time.
std::string version_string();
nlohmann::json meta_json(const ScenarioConfig& config);

} // namespace sarplan
