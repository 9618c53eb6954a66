#include "sarplan/errors.hpp"
#include "sarplan/risk_objective.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sarplan;

namespace {

// Gaussian bump of belief centred at `peak` on a square lattice.
BeliefGrid bump_prior(std::size_t n, double cell, Vec2 peak, double spread) {
    BeliefGrid b;
    b.lattice = {{0.0, 0.0}, cell, n, n};
    b.probs.resize(n * n);
    double total = 0.0;
    for (std::size_t c = 0; c < b.probs.size(); ++c) {
        const double d = distance(b.lattice.cell_center(c), peak);
        total += (b.probs[c] = std::exp(-d * d / (2.0 * spread * spread)) + 1e-4);
    }
    for (auto& p : b.probs) p /= total;
    return b;
}

GPPosterior make_post(std::vector<double> mean, std::vector<double> var) {
    GPPosterior p;
    p.cells.resize(mean.size());
    p.mean = std::move(mean);
    p.var = std::move(var);
    return p;
}

TrajectorySet straight_set(Vec3 a, Vec3 b, AltitudeBand band = {}) {
    std::vector<Vec3> c;
    for (int i = 0; i <= 3; ++i) c.push_back(a + (b - a) * (i / 3.0));
    TrajectorySet t;
    t.band = band;
    t.uavs.push_back(UavPath::from_control(c));
    return t;
}

} // namespace

TEST_CASE("risk arithmetic") {
    CHECK(risk_cost(make_post({0, 0, 0}, {1, 2, 3}), {1.0}) == 0.0);
    CHECK(risk_cost(make_post({0.5, 0.2}, {1.0, 0.0}), {1.0}) == doctest::Approx(0.45).epsilon(1e-15));
    const auto p = make_post({0.3, 0.25, 0.125}, {0.7, 0.1, 0.9});
    CHECK(risk_cost(p, {0.0}) == 0.3 + 0.25 + 0.125);
    CHECK(risk_cost(p, {2.0}) < risk_cost(p, {0.0}));
}

TEST_CASE("length hinge") {
    const auto t = straight_set({0, 0, 10}, {300, 400, 10}); // 500 m
    CHECK(length_cost(t, 500.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(length_cost(t, 490.0) == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(length_cost(t, 1000.0) == 0.0);
    CHECK(length_cost(TrajectorySet{}, 1.0) == 0.0);
}

TEST_CASE("smoothness hinge") {
    TrajectorySet t;
    t.uavs.push_back(UavPath::from_control({{0, 0, 0}, {0, 0, 0}, {0, 0, 3}, {0, 0, 6}})); // S = 9
    CHECK(smooth_cost(t, 9.0) == 0.0);
    CHECK(smooth_cost(t, 7.0) == 4.0);
    CHECK(smooth_cost(t, 100.0) == 0.0);
}

TEST_CASE("objective with no UAVs is the searcher-only risk") {
    const auto prior = bump_prior(20, 10.0, {120, 80}, 25.0);
    ObjectiveInputs in;
    in.prior = &prior;
    SearcherPath s;
    for (int i = 0; i <= 150; ++i) s.samples.push_back({double(i), {20.0 + i, 40.0}});
    in.searchers = {s};
    const Objective f(in);
    const auto r = f(TrajectorySet{});
    CHECK(r.length_cost == 0.0);
    CHECK(r.smooth_cost == 0.0);
    CHECK(r.observation_count == 0);
    const auto obs = assemble_observations(in.searchers, TrajectorySet{}, in.sample_spacing, in.sensor_height_ground);
    CHECK(r.risk == doctest::Approx(risk_cost(posterior(obs, prior, in.gp), in.risk)).epsilon(1e-10));
    CHECK(r.objective == r.risk);
}

TEST_CASE("a low pass over the peak lowers risk") {
    const auto prior = bump_prior(20, 10.0, {120, 80}, 25.0);
    ObjectiveInputs in;
    in.prior = &prior;
    const Objective f(in);
    const double empty = f(TrajectorySet{}).risk;
    const auto over_peak = straight_set({20, 80, 8}, {190, 80, 8});
    const auto r = f(over_peak);
    CHECK(r.risk < empty);
    CHECK(r.observation_count > 0);
}

TEST_CASE("report objective is the weighted sum of its parts") {
    const auto prior = bump_prior(20, 10.0, {100, 100}, 30.0);
    ObjectiveInputs in;
    in.prior = &prior;
    in.config.C_time = 100.0;
    in.config.C_smooth = 10.0;
    const Objective f(in);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.0, 200.0), alt(5.0, 60.0);
    for (int i = 0; i < 10; ++i) {
        TrajectorySet t;
        std::vector<Vec3> c(7);
        for (auto& p : c) p = {pos(rng), pos(rng), alt(rng)};
        t.uavs.push_back(UavPath::from_control(c));
        const auto r = f(t);
        CHECK(r.length_cost > 0.0);
        CHECK(r.smooth_cost > 0.0);
        const double rebuilt = r.risk + in.config.alpha_L * r.length_cost + in.config.alpha_S * r.smooth_cost;
        CHECK(std::abs(r.objective - rebuilt) <= 1e-9 * std::abs(rebuilt));
    }
}

TEST_CASE("zero readings at the most likely cell do not raise risk") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> pos(20.0, 180.0), spread(10.0, 40.0), alt(0.0, 20.0);
    for (int inst = 0; inst < 20; ++inst) {
        const auto prior = bump_prior(20, 10.0, {pos(rng), pos(rng)}, spread(rng));
        GibbsKernelParams k;
        std::vector<Observation> obs(15);
        for (auto& o : obs) o.p = {pos(rng), pos(rng), alt(rng)};
        const RiskParams mu{1.0};
        for (int step = 0; step < 5; ++step) {
            const auto post = posterior(obs, prior, k);
            const double before = risk_cost(post, mu);
            const auto top = std::max_element(post.mean.begin(), post.mean.end()) - post.mean.begin();
            const Vec2 c = post.cells[static_cast<std::size_t>(top)];
            obs.push_back({{c.x, c.y, 0.0}, 0.0});
            CHECK(risk_cost(posterior(obs, prior, k), mu) <= before + 1e-8);
        }
    }
}

TEST_CASE("risk is non-negative for non-negative means") {
    const auto prior = bump_prior(10, 10.0, {50, 50}, 20.0);
    const auto post = posterior({}, prior, GibbsKernelParams{});
    CHECK(risk_cost(post, {1.0}) > 0.0);
    ObjectiveInputs in;
    CHECK_THROWS_AS(Objective{in}, InvalidArgument);
    in.prior = &prior;
    in.risk.mu = -1.0;
    CHECK_THROWS_AS(Objective{in}, InvalidArgument);
    in.risk.mu = 1.0;
    in.config.C_time = 0.0;
    CHECK_THROWS_AS(Objective{in}, InvalidArgument);
}

TEST_CASE("sparse route agrees with the dense route when nothing is dropped") {
    const auto prior = bump_prior(15, 10.0, {70, 80}, 20.0);
    ObjectiveInputs in;
    in.prior = &prior;
    SearcherPath s;
    for (int i = 0; i <= 100; ++i) s.samples.push_back({double(i), {30.0, 20.0 + i}});
    in.searchers = {s};
    const Objective dense(in);
    in.sparse = MortonConfig{8, 1e6};
    const Objective sparse(in);
    const auto t = straight_set({10, 70, 12}, {140, 90, 20});
    CHECK(sparse(t).risk == doctest::Approx(dense(t).risk).epsilon(1e-9));
}
