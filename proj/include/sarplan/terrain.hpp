#pragma once

#include "sarplan/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sarplan {

// Cell-centered regular lattice. Cell (ix, iy) has its center at
// origin + ((ix + 0.5) * cell_size, (iy + 0.5) * cell_size). Values are stored
// row-major with iy as the row.
struct GridLattice {
    Vec2 origin;
    double cell_size = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 0;

    std::size_t cell_count() const { return nx * ny; }
    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
    Vec2 cell_center(std::size_t ix, std::size_t iy) const {
        return {origin.x + (static_cast<double>(ix) + 0.5) * cell_size,
                origin.y + (static_cast<double>(iy) + 0.5) * cell_size};
    }
    Vec2 cell_center(std::size_t flat) const { return cell_center(flat % nx, flat / nx); }
    Rect bounds() const {
        return {origin, {origin.x + static_cast<double>(nx) * cell_size,
                         origin.y + static_cast<double>(ny) * cell_size}};
    }
    // Cell containing p, clamped to the grid.
    std::size_t cell_of(const Vec2& p) const;

    friend bool operator==(const GridLattice&, const GridLattice&) = default;
};

// Bilinear interpolation between cell centers; positions beyond the outer
// ring of centers clamp to it.
double bilinear(const GridLattice& lattice, std::span<const double> values, const Vec2& p);
// Gradient of the same bilinear surface. Zero along a clamped axis.
Vec2 bilinear_gradient(const GridLattice& lattice, std::span<const double> values, const Vec2& p);

struct TerrainGrid {
    GridLattice lattice;
    std::vector<double> heights;

    // Throws InvalidArgument unless the grid is at least 2x2, cell_size > 0 and
    // every height is finite.
    void validate() const;

    friend bool operator==(const TerrainGrid&, const TerrainGrid&) = default;
};

struct TerrainParams {
    Vec2 extent{400.0, 400.0};
    double cell_size = 10.0;
    double amplitude = 20.0;
    double roughness = 0.55;
};

// Diamond-square midpoint displacement on the smallest 2^k+1 lattice covering
// the requested cell counts, cropped and rescaled so heights span
// [0, 2 * amplitude]. Same seed, same grid.
TerrainGrid generate_terrain(std::uint64_t seed, const TerrainParams& params);

double height_at(const TerrainGrid& grid, const Vec2& p);
Vec2 gradient_at(const TerrainGrid& grid, const Vec2& p);

} // namespace sarplan
