#pragma once

#include "sarplan/geometry.hpp"
#include "sarplan/terrain.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sarplan {

// Coefficients of the lost-person force balance
//   m x'' + (a |x'| - b) x' = alpha * grad h(x) + beta * F_R
// Defaults are the published simulation values; dt, horizon and the start
// spread are not published and are ours.
struct LostPersonParams {
    double mass = 70.0;
    double friction = 1e-3;          // a
    double self_accel = 1e-5;        // b
    double env_gain = -5.0;          // alpha
    double noise_gain = 0.3;         // beta
    double dt = 1.0;
    std::size_t horizon = 5000;

    void validate() const;
};

struct AgentState {
    Vec2 x;
    Vec2 v;
};

// Normalized probability mass over a terrain lattice.
struct BeliefGrid {
    GridLattice lattice;
    std::vector<double> probs;

    double max_prob() const;
    friend bool operator==(const BeliefGrid&, const BeliefGrid&) = default;
};

struct StartDistribution {
    Vec2 mean;
    double std = 30.0;
    Vec2 initial_velocity{0.0, 0.0};
};

// One semi-implicit Euler step. `noise` is a standard-normal 2D draw supplied
// by the caller. The agent reflects off the terrain boundary.
AgentState step_agent(const AgentState& state, const LostPersonParams& params,
                      const TerrainGrid& terrain, const Vec2& noise);

// Runs `iterations` independent rollouts of `params.horizon` steps and
// deposits one unit of mass at each final position. Rollout i draws from its
// own generator seeded from (seed, i), so the result does not depend on
// evaluation order.
BeliefGrid simulate_heatmap(const LostPersonParams& params, const TerrainGrid& terrain,
                            const StartDistribution& start, std::size_t iterations,
                            std::uint64_t seed);

// Final state of a single rollout, exposed for diagnostics and tests.
AgentState simulate_rollout(const LostPersonParams& params, const TerrainGrid& terrain,
                            const StartDistribution& start, std::uint64_t seed,
                            std::size_t rollout_index);

std::uint64_t rollout_seed(std::uint64_t seed, std::uint64_t index);

} // namespace sarplan
