#include "sarplan/lost_person.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sarplan {
namespace {

// Mirror a coordinate back into [lo, hi], flipping the velocity component.
void reflect(double& x, double& v, double lo, double hi) {
    const double span = hi - lo;
    for (int guard = 0; guard < 8 && (x < lo || x > hi); ++guard) {
        if (x < lo) x = 2.0 * lo - x;
        else x = 2.0 * hi - x;
        v = -v;
    }
    if (x < lo || x > hi) x = lo + std::fmod(std::abs(x - lo), span);
}

} // namespace

void LostPersonParams::validate() const {
    if (!(mass > 0.0)) throw InvalidArgument("lost person mass must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("lost person dt must be positive");
}

double BeliefGrid::max_prob() const {
    return probs.empty() ? 0.0 : *std::max_element(probs.begin(), probs.end());
}

std::uint64_t rollout_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over a combination of the two inputs
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

AgentState step_agent(const AgentState& s, const LostPersonParams& p, const TerrainGrid& terrain,
                      const Vec2& noise) {
    const Vec2 grad = gradient_at(terrain, s.x);
    const double drag = p.friction * norm(s.v) - p.self_accel;
    const Vec2 force = p.env_gain * grad + p.noise_gain * noise - drag * s.v;
    AgentState next;
    next.v = s.v + (p.dt / p.mass) * force;
    next.x = s.x + p.dt * next.v;
    const Rect b = terrain.lattice.bounds();
    reflect(next.x.x, next.v.x, b.lo.x, b.hi.x);
    reflect(next.x.y, next.v.y, b.lo.y, b.hi.y);
    return next;
}

AgentState simulate_rollout(const LostPersonParams& params, const TerrainGrid& terrain,
                            const StartDistribution& start, std::uint64_t seed,
                            std::size_t rollout_index) {
    std::mt19937_64 rng(rollout_seed(seed, rollout_index));
    std::normal_distribution<double> normal(0.0, 1.0);
    const Rect b = terrain.lattice.bounds();
    AgentState s;
    s.x = {start.mean.x + start.std * normal(rng), start.mean.y + start.std * normal(rng)};
    s.x.x = std::clamp(s.x.x, b.lo.x, b.hi.x);
    s.x.y = std::clamp(s.x.y, b.lo.y, b.hi.y);
    s.v = start.initial_velocity;
    for (std::size_t k = 0; k < params.horizon; ++k) {
        const Vec2 noise{normal(rng), normal(rng)};
        s = step_agent(s, params, terrain, noise);
    }
    return s;
}

BeliefGrid simulate_heatmap(const LostPersonParams& params, const TerrainGrid& terrain,
                            const StartDistribution& start, std::size_t iterations,
                            std::uint64_t seed) {
    params.validate();
    terrain.validate();
    if (iterations < 1) throw InvalidArgument("heatmap needs at least one iteration");
    if (!terrain.lattice.bounds().contains(start.mean))
        throw InvalidArgument("start distribution mean lies outside the terrain");
    if (!(start.std >= 0.0)) throw InvalidArgument("start std must be non-negative");

    BeliefGrid belief;
    belief.lattice = terrain.lattice;
    std::vector<std::uint64_t> counts(terrain.lattice.cell_count(), 0);
    for (std::size_t i = 0; i < iterations; ++i) {
        const AgentState s = simulate_rollout(params, terrain, start, seed, i);
        ++counts[terrain.lattice.cell_of(s.x)];
    }
    belief.probs.resize(counts.size());
    const double inv = 1.0 / static_cast<double>(iterations);
    for (std::size_t c = 0; c < counts.size(); ++c)
        belief.probs[c] = static_cast<double>(counts[c]) * inv;
    return belief;
}

} // namespace sarplan
