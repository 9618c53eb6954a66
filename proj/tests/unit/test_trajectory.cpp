#include "sarplan/errors.hpp"
#include "sarplan/io.hpp"
#include "sarplan/planner.hpp"
#include "sarplan/trajectory.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

using namespace sarplan;

namespace {

Vec3 random_point(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

UavPath random_path(std::mt19937_64& rng, std::size_t k, double scale) {
    std::vector<Vec3> c(3 * k + 1);
    for (auto& p : c) p = random_point(rng, scale);
    return UavPath::from_control(c);
}

double det3(Vec3 a, Vec3 b, Vec3 c) {
    return a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x);
}

// Barycentric coordinates of p in the tetrahedron (a, b, c, d). The hull of
// four affinely independent points is that tetrahedron, so p is inside iff
// all four coordinates are non-negative.
std::array<double, 4> barycentric(Vec3 p, Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
    const double v = det3(b - a, c - a, d - a);
    return {det3(b - p, c - p, d - p) / v, det3(p - a, c - a, d - a) / v,
            det3(b - a, p - a, d - a) / v, det3(b - a, c - a, p - a) / v};
}

Vec3 cubic(const std::array<Vec3, 4>& p, double u) {
    const double v = 1.0 - u;
    return p[0] * (v * v * v) + p[1] * (3 * v * v * u) + p[2] * (3 * v * u * u) + p[3] * (u * u * u);
}

double polyline_oracle(const UavPath& path, std::size_t n) {
    double len = 0.0;
    Vec3 prev = eval(path, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const Vec3 q = eval(path, static_cast<double>(i) / static_cast<double>(n));
        len += distance(prev, q);
        prev = q;
    }
    return len;
}

} // namespace

TEST_CASE("curve endpoints are the first and last control points") {
    std::mt19937_64 rng(1);
    for (std::size_t k = 1; k <= 6; ++k) {
        const auto path = random_path(rng, k, 100.0);
        CHECK(eval(path, 0.0) == path.control.front());
        CHECK(eval(path, 1.0) == path.control.back());
    }
    const auto path = random_path(rng, 2, 10.0);
    CHECK_THROWS_AS(eval(path, -1e-9), InvalidArgument);
    CHECK_THROWS_AS(eval(path, 1.0 + 1e-9), InvalidArgument);
    CHECK_THROWS_AS(UavPath::from_control({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}), InvalidArgument);
}

TEST_CASE("single segment midpoint") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto path = random_path(rng, 1, 100.0);
        const auto& c = path.control;
        const Vec3 expected = (c[0] + 3.0 * c[1] + 3.0 * c[2] + c[3]) * 0.125;
        CHECK(distance(eval(path, 0.5), expected) < 1e-12);
    }
}

TEST_CASE("composite segments map uniformly and meet at junctions") {
    std::mt19937_64 rng(3);
    const auto path = random_path(rng, 4, 50.0);
    for (std::size_t s = 0; s < 4; ++s) {
        const std::array<Vec3, 4> seg{path.control[3 * s], path.control[3 * s + 1], path.control[3 * s + 2],
                                      path.control[3 * s + 3]};
        for (double u : {0.0, 0.3, 0.5, 0.9})
            CHECK(distance(eval(path, (static_cast<double>(s) + u) / 4.0), cubic(seg, u)) < 1e-9);
    }
    for (std::size_t s = 1; s < 4; ++s) {
        const double t = static_cast<double>(s) / 4.0;
        CHECK(distance(eval(path, t), path.control[3 * s]) < 1e-12);
    }
    double max_poly = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
        double poly = 0.0;
        for (int a = 0; a < 3; ++a) poly += distance(path.control[3 * s + a], path.control[3 * s + a + 1]);
        max_poly = std::max(max_poly, poly);
    }
    for (double t = 0.0; t + 1e-6 <= 1.0; t += 0.01237)
        CHECK(distance(eval(path, t + 1e-6), eval(path, t)) <= max_poly * 4.0 * 1e-5);
}

TEST_CASE("curve points lie in the hull of the active segment") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 1 + i % 4;
        const auto path = random_path(rng, k, 100.0);
        const double t = ut(rng);
        const auto s = std::min<std::size_t>(static_cast<std::size_t>(t * double(k)), k - 1);
        const auto& c = path.control;
        const auto w = barycentric(eval(path, t), c[3 * s], c[3 * s + 1], c[3 * s + 2], c[3 * s + 3]);
        for (double x : w) CHECK(x >= -1e-9);
        CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0));
    }
}

TEST_CASE("arc length of degenerate curves") {
    std::vector<Vec3> line;
    for (int i = 0; i <= 6; ++i) line.push_back({100.0 * i / 6.0 * 0.6, 100.0 * i / 6.0 * 0.8, 20.0});
    CHECK(arc_length(UavPath::from_control(line)) == doctest::Approx(100.0).epsilon(1e-8));
    CHECK(smoothness(UavPath::from_control(line)) < 1e-20);
    const std::vector<Vec3> point(4, Vec3{3, 4, 5});
    CHECK(arc_length(UavPath::from_control(point)) == 0.0);
}

TEST_CASE("arc length against a dense polyline") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto path = random_path(rng, 1, 100.0);
        const double oracle = polyline_oracle(path, 100000);
        const double len = arc_length(path);
        CHECK(std::abs(len - oracle) / oracle < 5e-3);
        CHECK(len >= distance(path.control.front(), path.control.back()));
    }
    const auto multi = random_path(rng, 4, 100.0);
    TrajectorySet set;
    set.uavs = {multi, multi};
    CHECK(total_arc_length(set) == doctest::Approx(2.0 * arc_length(multi)));
}

TEST_CASE("smoothness cost") {
    const double h = 7.5;
    // One non-zero second difference, (0, 0, h).
    const auto path = UavPath::from_control({{0, 0, 0}, {0, 0, 0}, {0, 0, h}, {0, 0, 2 * h}});
    CHECK(smoothness(path) == h * h);

    std::mt19937_64 rng(6);
    TrajectorySet set;
    set.uavs = {random_path(rng, 3, 40.0), random_path(rng, 2, 40.0)};
    const double base = smoothness(set);
    for (auto& u : set.uavs)
        for (auto& c : u.control) c = c * 2.0;
    CHECK(smoothness(set) == 4.0 * base);
}

TEST_CASE("fit recovers a polyline that lies on one cubic") {
    const std::array<Vec3, 4> truth{Vec3{0, 0, 10}, Vec3{30, 50, 20}, Vec3{80, 60, 15}, Vec3{120, 10, 30}};
    std::vector<Vec3> pts;
    for (int i = 0; i <= 60; ++i) pts.push_back(cubic(truth, i / 60.0));
    const auto fit = fit_to_polyline(pts, 1);
    REQUIRE(fit.path.control.size() == 4);
    for (int a = 0; a < 4; ++a) CHECK(distance(fit.path.control[a], truth[a]) < 1e-6);
    CHECK(fit.rms < 1e-6);
}

TEST_CASE("fit of a straight two-point polyline") {
    const std::vector<Vec3> pts{{0, 0, 10}, {90, 120, 10}};
    const auto fit = fit_to_polyline(pts, 1);
    const auto& c = fit.path.control;
    const Vec3 dir = (c[3] - c[0]) * (1.0 / distance(c[3], c[0]));
    for (const auto& p : c) {
        const Vec3 d = p - c[0];
        const Vec3 off = d - dir * dot(d, dir);
        CHECK(norm(off) < 1e-9);
    }
    CHECK(arc_length(fit.path) == doctest::Approx(150.0).epsilon(1e-8));
    CHECK_THROWS_AS(fit_to_polyline(pts, 2), InvalidArgument);
    CHECK_THROWS_AS(fit_to_polyline(std::span(pts).first(1), 1), InvalidArgument);
}

TEST_CASE("fit error on planner output stays below the step size") {
    TerrainGrid flat;
    flat.lattice = {{0, 0}, 10.0, 30, 30};
    flat.heights.assign(900, 0.0);
    std::size_t tested = 0;
    for (std::uint64_t seed = 0; tested < 20 && seed < 200; ++seed) {
        RrtRequest req;
        req.start = {10, 10, 10};
        req.goal = {290, 250, 40};
        req.terrain = &flat;
        req.step = 10.0;
        req.seed = seed;
        auto path = rrt_plan(req);
        if (path.size() < 30) continue;
        path.resize(30);
        ++tested;
        const auto fit = fit_to_polyline(path, 4);
        CHECK(fit.rms < req.step);
        CHECK(fit.path.control.front() == path.front());
        CHECK(fit.path.control.back() == path.back());
    }
    CHECK(tested == 20);
}

TEST_CASE("trajectory sets survive a JSON round trip") {
    std::mt19937_64 rng(7);
    TrajectorySet set;
    set.band = {4.0, 70.0};
    set.uavs = {random_path(rng, 2, 60.0), random_path(rng, 4, 60.0)};
    for (auto& u : set.uavs)
        for (auto& c : u.control) c.z = 4.0 + std::abs(c.z);
    for (auto& u : set.uavs) u = UavPath::from_control(u.control);
    const auto back = io::trajectories_from_json(io::trajectories_to_json(set));
    REQUIRE(back.uavs.size() == 2);
    CHECK(back.band.min == 4.0);
    CHECK(back.band.max == 70.0);
    for (std::size_t u = 0; u < 2; ++u) {
        CHECK(back.uavs[u].control == set.uavs[u].control);
        CHECK(back.uavs[u].start == set.uavs[u].start);
        CHECK(back.uavs[u].goal == set.uavs[u].goal);
    }
}

TEST_CASE("projection pins endpoints and clamps altitude") {
    TrajectorySet set;
    set.band = {5.0, 60.0};
    auto path = UavPath::from_control({{0, 0, 10}, {10, 0, 90}, {20, 0, -4}, {30, 0, 10}});
    set.uavs = {path};
    CHECK_THROWS_AS(set.validate(), InvalidArgument);
    auto params = set.free_parameters();
    CHECK(params.size() == set.free_parameter_count());
    CHECK(params.size() == 6);
    for (auto& v : params) v += 1.0;
    set.set_free_parameters(params);
    set.uavs[0].control.front() = {5, 5, 5};
    set.project();
    CHECK_NOTHROW(set.validate());
    CHECK(set.uavs[0].control.front() == Vec3{0, 0, 10});
    CHECK(set.uavs[0].control[1].z == 60.0);
    CHECK(set.uavs[0].control[2].z == 5.0);
    CHECK(set.uavs[0].control[1].x == 11.0);
}

TEST_CASE("arc-length sampling") {
    std::vector<Vec3> line;
    for (int i = 0; i <= 3; ++i) line.push_back({100.0 * i / 3.0, 0.0, 15.0});
    const auto pts = sample_by_arc_length(UavPath::from_control(line), 10.0);
    REQUIRE(pts.size() == 11);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].x == doctest::Approx(10.0 * double(i)).epsilon(1e-6));
        CHECK(std::abs(pts[i].z - 15.0) < 1e-6);
    }
    CHECK_THROWS_AS(resample_polyline(line, 0.0), InvalidArgument);
}
