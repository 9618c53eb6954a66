#include "sarplan/errors.hpp"
#include "sarplan/linalg.hpp"

#include <doctest.h>

#ifdef SARPLAN_TEST_EIGEN
#include <Eigen/Dense>
#endif

#include <cmath>
#include <random>

using namespace sarplan;
using linalg::Cholesky;
using linalg::SquareMatrix;

namespace {

// A = B B^T + n I, comfortably positive definite.
SquareMatrix random_spd(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    SquareMatrix b(n), a(n);
    for (auto& x : b.data) x = g(rng);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = i == j ? static_cast<double>(n) : 0.0;
            for (std::size_t k = 0; k < n; ++k) s += b(i, k) * b(j, k);
            a(i, j) = s;
        }
    return a;
}

std::vector<double> solve(const Cholesky& c, std::vector<double> b) {
    c.forward_solve(b);
    c.backward_solve(b);
    return b;
}

} // namespace

TEST_CASE("factor reproduces the matrix") {
    for (std::size_t n : {1u, 2u, 5u, 33u, 80u}) {
        const auto a = random_spd(n, n);
        const auto c = Cholesky::factor(a);
        CHECK(c.jitter() == 0.0);
        const auto& l = c.lower();
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k <= j; ++k) s += l(i, k) * l(j, k);
                worst = std::max(worst, std::abs(s - a(i, j)) / std::abs(a(i, i)));
            }
        CHECK(worst < 1e-12);
    }
}

#ifdef SARPLAN_TEST_EIGEN
TEST_CASE("solves match an LU reference") {
    const std::size_t n = 60;
    const auto a = random_spd(n, 9);
    Eigen::MatrixXd ea(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ea(i, j) = a(i, j);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(static_cast<double>(i));
    const Eigen::VectorXd ref = ea.partialPivLu().solve(Eigen::Map<Eigen::VectorXd>(b.data(), n));
    const auto x = solve(Cholesky::factor(a), b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
}
#endif

TEST_CASE("a singular matrix is rescued by jitter") {
    SquareMatrix a(3);
    for (auto& x : a.data) x = 1.0; // rank one
    const auto c = Cholesky::factor(a);
    CHECK(c.jitter() > 0.0);
    CHECK(c.jitter() <= 1e-6);
}

TEST_CASE("an indefinite matrix fails after the whole ladder") {
    SquareMatrix a(2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    try {
        Cholesky::factor(a);
        FAIL("expected NumericalFailure");
    } catch (const NumericalFailure& e) {
        const auto& tried = e.attempted_jitters();
        REQUIRE(tried.size() == std::size(linalg::kJitterLadder));
        CHECK(tried.front() == 0.0);
        CHECK(tried.back() == 1e-6);
    }
}

TEST_CASE("tiled factor with every tile kept equals the dense factor") {
    const std::size_t n = 37, block = 8;
    const auto a = random_spd(n, 4);
    const std::size_t nb = (n + block - 1) / block;
    const auto dense = Cholesky::factor(a);
    const auto tiled = Cholesky::factor_tiled(a, block, std::vector<char>(nb * nb, 1));
    CHECK(tiled.tile_density() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < n * n; ++i)
        CHECK(tiled.lower().data[i] == doctest::Approx(dense.lower().data[i]).epsilon(1e-13));
}

TEST_CASE("tiled factor of a block-diagonal matrix stays block-diagonal") {
    const std::size_t block = 4, nb = 3, n = block * nb;
    SquareMatrix a(n);
    for (std::size_t t = 0; t < nb; ++t) {
        const auto sub = random_spd(block, 100 + t);
        for (std::size_t i = 0; i < block; ++i)
            for (std::size_t j = 0; j < block; ++j) a(t * block + i, t * block + j) = sub(i, j);
    }
    std::vector<char> keep(nb * nb, 0);
    const auto tiled = Cholesky::factor_tiled(a, block, keep);
    const auto dense = Cholesky::factor(a);
    for (std::size_t i = 0; i < n * n; ++i)
        CHECK(tiled.lower().data[i] == doctest::Approx(dense.lower().data[i]).epsilon(1e-13));
    CHECK(tiled.tile_density() < 1.0);

    std::vector<double> b(n, 1.0);
    const auto x1 = solve(tiled, b), x2 = solve(dense, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-13));
}
