#include "sarplan/risk_objective.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>

namespace sarplan {

void ObjectiveConfig::validate() const {
    if (!(alpha_L >= 0.0) || !(alpha_S >= 0.0)) throw InvalidArgument("penalty weights must be >= 0");
    if (!(C_time > 0.0) || !(C_smooth > 0.0)) throw InvalidArgument("constraint caps must be > 0");
}

double risk_cost(const GPPosterior& post, const RiskParams& params) {
    double r = 0.0;
    for (std::size_t i = 0; i < post.mean.size(); ++i) r += post.mean[i] / (1.0 + params.mu * post.var[i]);
    return r;
}

double length_cost(const TrajectorySet& traj, double cap) {
    const double excess = std::max(0.0, total_arc_length(traj) - cap);
    return excess * excess;
}

double smooth_cost(const TrajectorySet& traj, double cap) {
    const double excess = std::max(0.0, smoothness(traj) - cap);
    return excess * excess;
}

Objective::Objective(ObjectiveInputs inputs) : inputs_(std::move(inputs)) {
    if (!inputs_.prior) throw InvalidArgument("objective needs a prior heatmap");
    if (inputs_.risk.mu < 0.0) throw InvalidArgument("mu must be >= 0");
    inputs_.config.validate();
    inputs_.gp.validate();
    base_obs_ = assemble_observations(inputs_.searchers, TrajectorySet{}, inputs_.sample_spacing,
                                      inputs_.sensor_height_ground);
    if (!inputs_.sparse)
        session_ = std::make_shared<const ConditionedPosterior>(base_obs_, *inputs_.prior, inputs_.gp);
}

GPPosterior Objective::posterior_with(std::span<const Observation> extra) const {
    if (session_) return session_->with_extra(extra);
    std::vector<Observation> all = base_obs_;
    all.insert(all.end(), extra.begin(), extra.end());
    return sparse_posterior(all, *inputs_.prior, inputs_.gp, *inputs_.sparse);
}

double Objective::risk_with(std::span<const Observation> extra) const {
    return risk_cost(posterior_with(extra), inputs_.risk);
}

RiskReport Objective::operator()(const TrajectorySet& traj) const {
    const auto uav_obs = assemble_observations({}, traj, inputs_.sample_spacing, inputs_.sensor_height_ground);
    RiskReport r;
    r.risk = risk_with(uav_obs);
    r.length_cost = length_cost(traj, inputs_.config.C_time);
    r.smooth_cost = smooth_cost(traj, inputs_.config.C_smooth);
    r.objective = r.risk + inputs_.config.alpha_L * r.length_cost + inputs_.config.alpha_S * r.smooth_cost;
    r.observation_count = uav_obs.size();
    return r;
}

} // namespace sarplan
