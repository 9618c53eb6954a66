#include "sarplan/searcher.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sarplan {

void Sector::validate() const {
    if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
        throw InvalidArgument("sector bounds must have positive size");
    if (!bounds.contains(entry, 1e-9) || !bounds.contains(exit, 1e-9))
        throw InvalidArgument("sector entry/exit must lie inside the sector");
}

void SearcherParams::validate() const {
    if (!(speed > 0.0) || !(waypoint_radius > 0.0) || !(slope_threshold > 0.0) ||
        !(tenacity_growth >= 0.0) || !(dt > 0.0))
        throw InvalidArgument("searcher parameters must be positive");
}

std::vector<Vec2> SearcherPath::positions() const {
    std::vector<Vec2> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.p);
    return out;
}

std::vector<Vec2> lawnmower_waypoints(const Sector& sector, double spacing) {
    const Rect& b = sector.bounds;
    if (!(spacing > 0.0)) throw InvalidArgument("lawnmower spacing must be positive");
    const double eps = 1e-9;
    const bool across_x = spacing <= b.width() + eps;
    if (!across_x && spacing > b.height() + eps)
        throw InvalidArgument("lawnmower spacing exceeds both sector dimensions");

    // Offsets of the passes across the sweep axis, from the low edge.
    const double span = across_x ? b.width() : b.height();
    std::vector<double> offsets;
    for (std::size_t k = 0;; ++k) {
        const double o = static_cast<double>(k) * spacing;
        if (o > span - eps) break;
        offsets.push_back(o);
    }
    offsets.push_back(span);

    std::vector<Vec2> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int corner = 0; corner < 4; ++corner) {
        const bool flip_sweep = corner & 1; // start at the high edge of the sweep axis
        const bool flip_pass = corner & 2;  // first pass runs high-to-low
        std::vector<Vec2> wps;
        wps.reserve(2 * offsets.size());
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const double o = flip_sweep ? span - offsets[k] : offsets[k];
            const bool reverse = ((k % 2) == 1) != flip_pass;
            if (across_x) {
                const double x = b.lo.x + o;
                wps.push_back({x, reverse ? b.hi.y : b.lo.y});
                wps.push_back({x, reverse ? b.lo.y : b.hi.y});
            } else {
                const double y = b.lo.y + o;
                wps.push_back({reverse ? b.hi.x : b.lo.x, y});
                wps.push_back({reverse ? b.lo.x : b.hi.x, y});
            }
        }
        const double cost = distance(sector.entry, wps.front()) + distance(wps.back(), sector.exit);
        if (cost < best_cost - 1e-12) {
            best_cost = cost;
            best = std::move(wps);
        }
    }
    return best;
}

SearcherPath simulate_searcher(const Sector& sector, const std::vector<Vec2>& waypoints,
                               const SearcherParams& params, const TerrainGrid& terrain) {
    params.validate();
    if (waypoints.empty()) throw InvalidArgument("searcher needs at least one waypoint");

    std::vector<Vec2> targets = waypoints;
    targets.push_back(sector.exit);

    const Rect area = terrain.lattice.bounds();
    const double step_len = params.speed * params.dt;

    SearcherPath path;
    path.waypoints_total = targets.size();
    Vec2 p = sector.entry;
    double tenacity = 1.0;
    std::size_t target = 0;
    double t = 0.0;
    path.samples.push_back({t, p, SearchMode::Waypoint, params.slope_threshold});

    auto capture = [&] {
        while (target < targets.size() && distance(p, targets[target]) <= params.waypoint_radius) {
            ++target;
            tenacity = 1.0;
        }
    };
    capture();

    for (std::size_t step = 0; step < params.max_steps && target < targets.size(); ++step) {
        const Vec2 to_target = targets[target] - p;
        const double dist = norm(to_target);
        const Vec2 heading = to_target * (1.0 / dist);
        const Vec2 grad = gradient_at(terrain, p);
        const double threshold = params.slope_threshold * tenacity;

        SearchMode mode = SearchMode::Waypoint;
        Vec2 move = heading * std::min(step_len, dist);
        if (dot(grad, heading) > threshold) {
            // Too steep to climb straight on: walk the level set, on the side
            // that still makes progress toward the target.
            const double g = norm(grad);
            Vec2 contour{-grad.y / g, grad.x / g};
            if (dot(contour, heading) < 0.0) contour = contour * -1.0;
            move = contour * step_len;
            mode = SearchMode::Gradient;
            tenacity += params.tenacity_growth;
        }

        p += move;
        p.x = std::clamp(p.x, area.lo.x, area.hi.x);
        p.y = std::clamp(p.y, area.lo.y, area.hi.y);
        t += params.dt;
        path.samples.push_back({t, p, mode, threshold});
        capture();
    }

    path.waypoints_captured = target;
    path.completed = target == targets.size();
    if (!path.completed) path.samples.back().mode = SearchMode::Exhausted;
    return path;
}

} // namespace sarplan
