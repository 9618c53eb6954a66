#pragma once

#include "sarplan/geometry.hpp"
#include "sarplan/risk_objective.hpp"
#include "sarplan/terrain.hpp"
#include "sarplan/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sarplan {

// Infinitely tall cylinder.
struct NoFlyZone {
    Vec2 center;
    double radius = 0.0;

    bool contains(const Vec2& p) const { return distance(p, center) < radius; }
};

inline constexpr double kTerrainClearance = 2.0; // m

// Planning space: terrain extent x altitude band (altitude above terrain).
struct RrtRequest {
    Vec3 start;
    Vec3 goal;
    const TerrainGrid* terrain = nullptr;
    std::vector<NoFlyZone> zones;
    AltitudeBand band;
    double step = 10.0;
    std::size_t max_nodes = 3000;
    std::uint64_t seed = 0;
    double goal_bias = 0.05;
    double clearance = kTerrainClearance;
};

bool point_collides(const Vec3& p, std::span<const NoFlyZone> zones, double clearance);
// Exact in the horizontal plane (segment-to-center distance); altitude is
// linear along the edge so the endpoints bound it.
bool edge_collides(const Vec3& a, const Vec3& b, std::span<const NoFlyZone> zones, double clearance);
double polyline_length(std::span<const Vec3> pts);

// Plain RRT; returns the first path that reaches within `step` of the goal.
std::vector<Vec3> rrt_plan(const RrtRequest& req);
// RRT* on the same sample stream as rrt_plan (so its node set is a superset
// of the RRT run's), rewiring within (log n / n)^(1/3)-shrinking balls, and
// returning the cheapest goal connection once max_nodes is reached.
std::vector<Vec3> rrt_star_plan(const RrtRequest& req);

struct OptimizerConfig {
    double eta = 0.5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double fd_step = 0.1;
    std::size_t max_iters = 150;
    double rel_tol = 1e-5;
    std::size_t patience = 10;
    double zone_penalty_weight = 1e3;
    double clearance = kTerrainClearance;
    double collision_resolution = 0.1; // m

    void validate() const;
};

struct IterationRecord {
    std::size_t iter = 0;
    RiskReport report;   // candidate evaluated this iteration
    int feasible = -1;   // 1 clean, 0 colliding, -1 not checked
    double best_objective = 0.0;
};

struct OptimizeResult {
    TrajectorySet best;
    std::vector<IterationRecord> log;
    bool feasible = false;       // false: every candidate collided, `best` is the initial set
    bool penalty_activated = false;
    RiskReport best_report;
};

using ObjectiveHandle = std::function<RiskReport(const TrajectorySet&)>;

std::vector<double> central_difference_gradient(
    const std::function<double(std::span<const double>)>& f, std::span<const double> x, double h);

// True if any point sampled every `resolution` m along any UAV curve is inside
// a zone or below the clearance.
bool trajectory_collides(const TrajectorySet& traj, std::span<const NoFlyZone> zones,
                         double clearance, double resolution);
// Sum of squared penetration depths into zones and below clearance.
double zone_penetration(const TrajectorySet& traj, std::span<const NoFlyZone> zones, double clearance);

OptimizeResult optimize(const TrajectorySet& initial, const ObjectiveHandle& objective,
                        const OptimizerConfig& config, std::span<const NoFlyZone> zones);

} // namespace sarplan
