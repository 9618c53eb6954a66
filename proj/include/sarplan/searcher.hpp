#pragma once

#include "sarplan/geometry.hpp"
#include "sarplan/terrain.hpp"

#include <cstddef>
#include <vector>

namespace sarplan {

struct Sector {
    Rect bounds;
    Vec2 entry;
    Vec2 exit;

    void validate() const;
};

struct SearcherParams {
    double speed = 1.0;            // m/s
    double waypoint_radius = 5.0;  // m
    double slope_threshold = 0.6;  // rise/run
    double tenacity_growth = 0.002;
    double dt = 1.0;
    std::size_t max_steps = 20000;

    void validate() const;
};

enum class SearchMode { Waypoint, Gradient, Exhausted };

struct SearcherSample {
    double t = 0.0;
    Vec2 p;
    SearchMode mode = SearchMode::Waypoint;
    // slope_threshold * tenacity in force when the sample was taken
    double effective_threshold = 0.0;
};

struct SearcherPath {
    std::vector<SearcherSample> samples;
    std::size_t waypoints_captured = 0;
    std::size_t waypoints_total = 0;
    bool completed = false;

    std::vector<Vec2> positions() const;
};

// Boustrophedon sweep with passes `spacing` apart. Passes run along y and
// step across x when spacing fits the sector width, otherwise they run along
// x. Of the four possible starting corners the one minimising
// |entry - first| + |last - exit| wins.
std::vector<Vec2> lawnmower_waypoints(const Sector& sector, double spacing);

// Self-propelled particle starting at sector.entry, visiting `waypoints` and
// then sector.exit. Steps uphill steeper than slope_threshold * tenacity are
// refused and the particle follows the contour instead; tenacity grows while
// blocked and resets on each capture.
SearcherPath simulate_searcher(const Sector& sector, const std::vector<Vec2>& waypoints,
                               const SearcherParams& params, const TerrainGrid& terrain);

} // namespace sarplan
