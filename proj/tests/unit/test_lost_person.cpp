#include "sarplan/errors.hpp"
#include "sarplan/lost_person.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace sarplan;

namespace {

TerrainGrid flat(double extent = 400.0, double cell = 10.0) {
    TerrainGrid g;
    const auto n = static_cast<std::size_t>(extent / cell);
    g.lattice = {{0.0, 0.0}, cell, n, n};
    g.heights.assign(n * n, 5.0);
    return g;
}

TerrainGrid hills(std::uint64_t seed) {
    TerrainParams p;
    p.extent = {400.0, 400.0};
    return generate_terrain(seed, p);
}

double total(const BeliefGrid& b) { return std::accumulate(b.probs.begin(), b.probs.end(), 0.0); }

} // namespace

TEST_CASE("an agent at rest on flat ground with no noise stays put") {
    LostPersonParams p;
    p.noise_gain = 0.0;
    const auto g = flat();
    AgentState s{{123.0, 77.0}, {0.0, 0.0}};
    for (int i = 0; i < 100; ++i) s = step_agent(s, p, g, {0.7, -1.3});
    CHECK(s.x == Vec2{123.0, 77.0});
    CHECK(s.v == Vec2{0.0, 0.0});
}

TEST_CASE("speed settles where drag balances self-acceleration") {
    LostPersonParams p;
    p.mass = 1.0;
    p.friction = 0.5;
    p.self_accel = 0.1;
    p.noise_gain = 0.0;
    p.dt = 0.1;
    const auto g = flat(4000.0, 100.0);
    for (Vec2 v0 : {Vec2{3.0, -1.0}, Vec2{0.01, 0.02}}) {
        AgentState s{{2000.0, 2000.0}, v0};
        for (int i = 0; i < 2000; ++i) s = step_agent(s, p, g, {0.0, 0.0});
        CHECK(norm(s.v) == doctest::Approx(p.self_accel / p.friction).epsilon(1e-6));
    }
}

TEST_CASE("published parameters stay bounded over 10^4 steps") {
    LostPersonParams p;
    const auto g = hills(7);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    AgentState s{{200.0, 200.0}, {0.0, 0.0}};
    const Rect b = g.lattice.bounds();
    for (int i = 0; i < 10000; ++i) {
        s = step_agent(s, p, g, {n01(rng), n01(rng)});
        REQUIRE(b.contains(s.x));
        REQUIRE(std::isfinite(s.v.x));
        REQUIRE(std::isfinite(s.v.y));
    }
}

TEST_CASE("halving dt changes a noiseless rollout by under 5% of its length") {
    LostPersonParams p;
    p.noise_gain = 0.0;
    const auto g = hills(11);
    auto run = [&](double dt, int steps, double& length) {
        LostPersonParams q = p;
        q.dt = dt;
        AgentState s{{170.0, 230.0}, {0.3, -0.2}};
        length = 0.0;
        for (int i = 0; i < steps; ++i) {
            const auto next = step_agent(s, q, g, {0.0, 0.0});
            length += distance(next.x, s.x);
            s = next;
        }
        return s.x;
    };
    double l1 = 0.0, l2 = 0.0;
    const Vec2 a = run(1.0, 200, l1);
    const Vec2 b = run(0.5, 400, l2);
    CHECK(l1 > 1.0);
    CHECK(distance(a, b) < 0.05 * l1);
}

TEST_CASE("heatmap is normalised and deterministic") {
    LostPersonParams p;
    p.horizon = 300;
    const auto g = hills(3);
    const StartDistribution start{{200.0, 200.0}, 30.0, {0.0, 0.0}};
    const auto a = simulate_heatmap(p, g, start, 2000, 42);
    const auto b = simulate_heatmap(p, g, start, 2000, 42);
    CHECK(a == b);
    CHECK(total(a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(total(a) - 1.0) <= 1e-9);
    for (double v : a.probs) CHECK(v >= 0.0);
    CHECK(a.lattice == g.lattice);
    CHECK(simulate_heatmap(p, g, start, 2000, 43) != a);
}

TEST_CASE("paper-scale heatmap: 25000 rollouts on a 40x40 grid") {
    LostPersonParams p;
    p.horizon = 50; // the normalisation claim does not depend on the horizon
    const auto g = hills(7);
    const auto h = simulate_heatmap(p, g, {{200.0, 200.0}, 30.0, {}}, 25000, 1);
    CHECK(h.probs.size() == 1600);
    CHECK(std::abs(total(h) - 1.0) <= 1e-9);
}

TEST_CASE("with no motion the mass sits on the start draws") {
    const auto g = flat();
    const StartDistribution start{{150.0, 260.0}, 25.0, {0.0, 0.0}};
    LostPersonParams still;
    still.noise_gain = 0.0;
    LostPersonParams zero_horizon;
    zero_horizon.horizon = 0;
    for (const auto& p : {still, zero_horizon}) {
        const auto h = simulate_heatmap(p, g, start, 500, 9);
        std::vector<double> expect(g.lattice.cell_count(), 0.0);
        for (std::size_t i = 0; i < 500; ++i) {
            // horizon 0 means the rollout returns its start draw
            LostPersonParams none = p;
            none.horizon = 0;
            const auto s = simulate_rollout(none, g, start, 9, i);
            expect[g.lattice.cell_of(s.x)] += 1.0 / 500.0;
        }
        for (std::size_t c = 0; c < expect.size(); ++c) CHECK(h.probs[c] == doctest::Approx(expect[c]));
    }
}

TEST_CASE("rollouts do not depend on evaluation order") {
    LostPersonParams p;
    p.horizon = 100;
    const auto g = hills(5);
    const StartDistribution start{{100.0, 300.0}, 10.0, {}};
    const auto late = simulate_rollout(p, g, start, 77, 31);
    simulate_rollout(p, g, start, 77, 30);
    const auto again = simulate_rollout(p, g, start, 77, 31);
    CHECK(late.x == again.x);
    CHECK(rollout_seed(77, 31) != rollout_seed(77, 30));
    CHECK(rollout_seed(77, 31) != rollout_seed(78, 31));
}

TEST_CASE("start outside the terrain is rejected") {
    const auto g = flat();
    LostPersonParams p;
    CHECK_THROWS_AS(simulate_heatmap(p, g, {{-5.0, 10.0}, 1.0, {}}, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(simulate_heatmap(p, g, {{5.0, 10.0}, 1.0, {}}, 0, 1), InvalidArgument);
}
