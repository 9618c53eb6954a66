#include "sarplan/planner.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sarplan {

void OptimizerConfig::validate() const {
    if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw InvalidArgument("Adam betas must lie in [0, 1)");
    if (!(fd_step > 0.0)) throw InvalidArgument("fd_step must be positive");
    if (!(collision_resolution > 0.0)) throw InvalidArgument("collision resolution must be positive");
}

std::vector<double> central_difference_gradient(
    const std::function<double(std::span<const double>)>& f, std::span<const double> x, double h) {
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + h;
        const double up = f(probe);
        probe[j] = x[j] - h;
        const double down = f(probe);
        probe[j] = x[j];
        g[j] = (up - down) / (2.0 * h);
    }
    return g;
}

bool trajectory_collides(const TrajectorySet& traj, std::span<const NoFlyZone> zones,
                         double clearance, double resolution) {
    for (const auto& u : traj.uavs) {
        for (const auto& p : sample_by_arc_length(u, resolution))
            if (point_collides(p, zones, clearance)) return true;
        if (point_collides(u.control.back(), zones, clearance)) return true;
    }
    return false;
}

double zone_penetration(const TrajectorySet& traj, std::span<const NoFlyZone> zones, double clearance) {
    double total = 0.0;
    for (const auto& u : traj.uavs)
        for (const auto& p : flatten(u, 32)) {
            const double below = std::max(0.0, clearance - p.z);
            total += below * below;
            for (const auto& z : zones) {
                const double depth = std::max(0.0, z.radius - distance(p.xy(), z.center));
                total += depth * depth;
            }
        }
    return total;
}

OptimizeResult optimize(const TrajectorySet& initial, const ObjectiveHandle& objective,
                        const OptimizerConfig& config, std::span<const NoFlyZone> zones) {
    config.validate();
    initial.validate();

    OptimizeResult result;
    result.best = initial;

    bool penalty = false;
    auto total = [&](const TrajectorySet& t, const RiskReport& r) {
        return r.objective + (penalty ? config.zone_penalty_weight * zone_penetration(t, zones, config.clearance) : 0.0);
    };

    TrajectorySet current = initial;
    RiskReport current_report = objective(current);
    double best = std::numeric_limits<double>::infinity();

    {
        IterationRecord rec{0, current_report, 0, 0.0};
        if (!trajectory_collides(current, zones, config.clearance, config.collision_resolution)) {
            rec.feasible = 1;
            best = current_report.objective;
            result.feasible = true;
            result.best_report = current_report;
        } else {
            penalty = true;
        }
        rec.best_objective = best;
        result.log.push_back(rec);
    }

    std::vector<double> x = current.free_parameters();
    std::vector<double> m(x.size(), 0.0), v(x.size(), 0.0);
    std::vector<double> grad(x.size());
    TrajectorySet probe = current;

    for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
        // Finite differences of F (+ zone penalty once activated). A side
        // whose UAV observation count differs from the centre straddles a
        // resampling jump; fall back to the one-sided difference on the
        // other side when that happens.
        const double centre = total(current, current_report);
        std::vector<double> xp = x;
        for (std::size_t j = 0; j < x.size(); ++j) {
            xp[j] = x[j] + config.fd_step;
            probe.set_free_parameters(xp);
            const RiskReport up_r = objective(probe);
            const double up = total(probe, up_r);
            xp[j] = x[j] - config.fd_step;
            probe.set_free_parameters(xp);
            const RiskReport dn_r = objective(probe);
            const double dn = total(probe, dn_r);
            xp[j] = x[j];
            const bool up_ok = up_r.observation_count == current_report.observation_count;
            const bool dn_ok = dn_r.observation_count == current_report.observation_count;
            if (up_ok == dn_ok) grad[j] = (up - dn) / (2.0 * config.fd_step);
            else if (up_ok) grad[j] = (up - centre) / config.fd_step;
            else grad[j] = (centre - dn) / config.fd_step;
        }

        const double t = static_cast<double>(iter);
        const double c1 = 1.0 - std::pow(config.beta1, t);
        const double c2 = 1.0 - std::pow(config.beta2, t);
        for (std::size_t j = 0; j < x.size(); ++j) {
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * grad[j];
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * grad[j] * grad[j];
            x[j] -= config.eta * (m[j] / c1) / (std::sqrt(v[j] / c2) + config.eps);
        }
        current.set_free_parameters(x);
        current.project();
        x = current.free_parameters();
        current_report = objective(current);

        IterationRecord rec{iter, current_report, -1, best};
        // Delayed collision checking: only a would-be incumbent is tested.
        if (current_report.objective < best) {
            if (!trajectory_collides(current, zones, config.clearance, config.collision_resolution)) {
                rec.feasible = 1;
                best = current_report.objective;
                result.best = current;
                result.best_report = current_report;
                result.feasible = true;
            } else {
                rec.feasible = 0;
                penalty = true;
            }
        }
        rec.best_objective = best;
        result.log.push_back(rec);

        if (iter >= config.patience) {
            const double before = result.log[iter - config.patience].best_objective;
            if (std::isfinite(before) && before - best < config.rel_tol * std::abs(before)) break;
        }
    }

    result.penalty_activated = penalty;
    if (!result.feasible) {
        result.best = initial;
        result.best_report = result.log.front().report;
    }
    return result;
}

} // namespace sarplan
