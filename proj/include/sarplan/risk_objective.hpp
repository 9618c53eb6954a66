#pragma once

#include "sarplan/sensing_gp.hpp"
#include "sarplan/trajectory.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace sarplan {

struct RiskParams {
    double mu = 1.0;
};

struct ObjectiveConfig {
    double alpha_L = 1e-4;
    double alpha_S = 1e-2;
    double C_time = 2000.0;   // m, summed over UAVs
    double C_smooth = 20000.0; // m^2

    void validate() const;
};

struct RiskReport {
    double risk = 0.0;
    double length_cost = 0.0;
    double smooth_cost = 0.0;
    double objective = 0.0;
    double planning_time = 0.0; // s
    // Number of UAV observations behind this evaluation. The optimizer uses
    // it to spot discontinuities of the sampled objective.
    std::size_t observation_count = 0;
};

// sum_i mean_i / (1 + mu * var_i) over all cells.
double risk_cost(const GPPosterior& post, const RiskParams& params);

// max(0, total_arc_length - cap)^2
double length_cost(const TrajectorySet& traj, double cap);
// max(0, smoothness - cap)^2
double smooth_cost(const TrajectorySet& traj, double cap);

// Frozen scenario inputs for one optimisation session.
struct ObjectiveInputs {
    const BeliefGrid* prior = nullptr;
    std::vector<SearcherPath> searchers;
    GibbsKernelParams gp;
    double sample_spacing = 10.0;
    double sensor_height_ground = 1.7;
    RiskParams risk;
    ObjectiveConfig config;
    std::optional<MortonConfig> sparse;
};

// Evaluates F = R + alpha_L L + alpha_S S. The dense route conditions on the
// searcher observations once and updates per trajectory set; the sparse
// route runs sparse_posterior on the full observation set every call.
class Objective {
public:
    explicit Objective(ObjectiveInputs inputs);

    RiskReport operator()(const TrajectorySet& traj) const;
    // Risk of the searchers plus arbitrary extra observations (no penalties).
    double risk_with(std::span<const Observation> extra) const;
    GPPosterior posterior_with(std::span<const Observation> extra) const;

    const ObjectiveInputs& inputs() const { return inputs_; }
    const std::vector<Observation>& searcher_observations() const { return base_obs_; }

private:
    ObjectiveInputs inputs_;
    std::vector<Observation> base_obs_;
    std::shared_ptr<const ConditionedPosterior> session_;
};

} // namespace sarplan
