#include "sarplan/terrain.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sarplan {
namespace {

struct BilinearCell {
    std::size_t i0, j0;
    double fx, fy;
    bool clamped_x, clamped_y;
};

// Locates p among the cell centers. Grids are at least 2x2, so i0+1 and j0+1
// are always valid.
BilinearCell locate(const GridLattice& g, const Vec2& p) {
    BilinearCell c{};
    auto axis = [](double coord, double origin, double cell, std::size_t n, std::size_t& i0,
                   double& f, bool& clamped) {
        double u = (coord - origin) / cell - 0.5;
        const double hi = static_cast<double>(n - 1);
        clamped = !(u > 0.0 && u < hi);
        u = std::clamp(u, 0.0, hi);
        i0 = std::min(static_cast<std::size_t>(u), n - 2);
        f = u - static_cast<double>(i0);
    };
    axis(p.x, g.origin.x, g.cell_size, g.nx, c.i0, c.fx, c.clamped_x);
    axis(p.y, g.origin.y, g.cell_size, g.ny, c.j0, c.fy, c.clamped_y);
    return c;
}

} // namespace

std::size_t GridLattice::cell_of(const Vec2& p) const {
    auto axis = [&](double coord, double o, std::size_t n) {
        const double u = std::floor((coord - o) / cell_size);
        if (!(u > 0.0)) return std::size_t{0};
        return std::min(static_cast<std::size_t>(u), n - 1);
    };
    return index(axis(p.x, origin.x, nx), axis(p.y, origin.y, ny));
}

double bilinear(const GridLattice& g, std::span<const double> v, const Vec2& p) {
    const BilinearCell c = locate(g, p);
    const double h00 = v[g.index(c.i0, c.j0)];
    const double h10 = v[g.index(c.i0 + 1, c.j0)];
    const double h01 = v[g.index(c.i0, c.j0 + 1)];
    const double h11 = v[g.index(c.i0 + 1, c.j0 + 1)];
    return (h00 * (1.0 - c.fx) + h10 * c.fx) * (1.0 - c.fy) + (h01 * (1.0 - c.fx) + h11 * c.fx) * c.fy;
}

Vec2 bilinear_gradient(const GridLattice& g, std::span<const double> v, const Vec2& p) {
    const BilinearCell c = locate(g, p);
    const double h00 = v[g.index(c.i0, c.j0)];
    const double h10 = v[g.index(c.i0 + 1, c.j0)];
    const double h01 = v[g.index(c.i0, c.j0 + 1)];
    const double h11 = v[g.index(c.i0 + 1, c.j0 + 1)];
    Vec2 grad;
    if (!c.clamped_x) grad.x = ((h10 - h00) * (1.0 - c.fy) + (h11 - h01) * c.fy) / g.cell_size;
    if (!c.clamped_y) grad.y = ((h01 - h00) * (1.0 - c.fx) + (h11 - h10) * c.fx) / g.cell_size;
    return grad;
}

void TerrainGrid::validate() const {
    if (!(lattice.cell_size > 0.0)) throw InvalidArgument("terrain cell_size must be positive");
    if (lattice.nx < 2 || lattice.ny < 2) throw InvalidArgument("terrain grid must be at least 2x2");
    if (heights.size() != lattice.cell_count())
        throw InvalidArgument("terrain heights do not match grid dimensions");
    for (double h : heights)
        if (!std::isfinite(h)) throw InvalidArgument("terrain contains a non-finite elevation");
}

TerrainGrid generate_terrain(std::uint64_t seed, const TerrainParams& params) {
    if (!(params.cell_size > 0.0)) throw InvalidArgument("cell_size must be positive");
    if (!(params.extent.x > 0.0) || !(params.extent.y > 0.0))
        throw InvalidArgument("terrain extent must be positive");
    if (!(params.amplitude >= 0.0)) throw InvalidArgument("amplitude must be non-negative");
    if (!(params.roughness > 0.0 && params.roughness < 1.0))
        throw InvalidArgument("roughness must lie in (0, 1)");

    auto cells = [&](double extent) {
        const double ratio = extent / params.cell_size;
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 2.0)
            throw InvalidArgument("extent must be a multiple of cell_size spanning at least 2 cells");
        return static_cast<std::size_t>(rounded);
    };
    const std::size_t nx = cells(params.extent.x);
    const std::size_t ny = cells(params.extent.y);

    std::size_t size = 2;
    while (size + 1 < std::max(nx, ny)) size *= 2;
    const std::size_t n = size + 1;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> ds(n * n, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return ds[j * n + i]; };
    at(0, 0) = unit(rng);
    at(size, 0) = unit(rng);
    at(0, size) = unit(rng);
    at(size, size) = unit(rng);

    double scale = 1.0;
    for (std::size_t step = size; step > 1; step /= 2) {
        const std::size_t half = step / 2;
        // Diamond: square centers from their four corners.
        for (std::size_t j = half; j < n; j += step)
            for (std::size_t i = half; i < n; i += step)
                at(i, j) = 0.25 * (at(i - half, j - half) + at(i + half, j - half) +
                                   at(i - half, j + half) + at(i + half, j + half)) +
                           scale * unit(rng);
        // Square: edge midpoints from the 3 or 4 in-grid neighbours.
        for (std::size_t j = 0; j < n; j += half) {
            for (std::size_t i = (j / half) % 2 == 0 ? half : 0; i < n; i += step) {
                double sum = 0.0;
                int count = 0;
                if (i >= half) { sum += at(i - half, j); ++count; }
                if (i + half < n) { sum += at(i + half, j); ++count; }
                if (j >= half) { sum += at(i, j - half); ++count; }
                if (j + half < n) { sum += at(i, j + half); ++count; }
                at(i, j) = sum / count + scale * unit(rng);
            }
        }
        scale *= params.roughness;
    }

    TerrainGrid grid;
    grid.lattice = {{0.0, 0.0}, params.cell_size, nx, ny};
    grid.heights.resize(nx * ny);
    double lo = ds[0], hi = ds[0];
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            lo = std::min(lo, at(i, j));
            hi = std::max(hi, at(i, j));
        }
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double unit_h = hi > lo ? (at(i, j) - lo) / (hi - lo) : 0.0;
            grid.heights[grid.lattice.index(i, j)] = 2.0 * params.amplitude * unit_h;
        }
    return grid;
}

double height_at(const TerrainGrid& grid, const Vec2& p) {
    return bilinear(grid.lattice, grid.heights, p);
}

Vec2 gradient_at(const TerrainGrid& grid, const Vec2& p) {
    return bilinear_gradient(grid.lattice, grid.heights, p);
}

} // namespace sarplan
