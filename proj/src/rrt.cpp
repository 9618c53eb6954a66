#include "sarplan/planner.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace sarplan {
namespace {

struct Tree {
    std::vector<Vec3> pos;
    std::vector<std::size_t> parent;
    std::vector<double> cost;
    std::vector<std::vector<std::size_t>> children;

    std::size_t add(const Vec3& p, std::size_t par, double c) {
        pos.push_back(p);
        parent.push_back(par);
        cost.push_back(c);
        children.emplace_back();
        if (par != npos) children[par].push_back(pos.size() - 1);
        return pos.size() - 1;
    }

    void reparent(std::size_t node, std::size_t new_parent, double new_cost) {
        auto& sib = children[parent[node]];
        sib.erase(std::find(sib.begin(), sib.end(), node));
        parent[node] = new_parent;
        children[new_parent].push_back(node);
        const double delta = cost[node] - new_cost;
        std::vector<std::size_t> stack{node};
        while (!stack.empty()) {
            const std::size_t n = stack.back();
            stack.pop_back();
            cost[n] -= delta;
            for (std::size_t c : children[n]) stack.push_back(c);
        }
    }

    std::vector<Vec3> path_to(std::size_t node, const Vec3& goal) const {
        std::vector<Vec3> out{goal};
        for (std::size_t n = node; n != npos; n = parent[n]) out.push_back(pos[n]);
        std::reverse(out.begin(), out.end());
        return out;
    }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

void check_request(const RrtRequest& req) {
    if (!req.terrain) throw InvalidArgument("RRT needs a terrain");
    if (!(req.step > 0.0)) throw InvalidArgument("RRT step must be positive");
    if (req.max_nodes < 2) throw InvalidArgument("RRT needs max_nodes >= 2");
    const Rect area = req.terrain->lattice.bounds();
    for (const Vec3* p : {&req.start, &req.goal}) {
        if (!area.contains(p->xy())) throw InvalidArgument("RRT endpoint outside the terrain");
        if (point_collides(*p, req.zones, req.clearance))
            throw InvalidArgument("RRT endpoint inside a no-fly zone or below clearance");
    }
}

template <bool Star>
std::vector<Vec3> plan(const RrtRequest& req) {
    check_request(req);
    const Rect area = req.terrain->lattice.bounds();
    std::mt19937_64 rng(req.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Tree tree;
    tree.add(req.start, Tree::npos, 0.0);
    std::vector<std::size_t> goal_links;

    // RRT* ball radius constant for a 3D box.
    const double volume = area.width() * area.height() * std::max(req.band.max - req.band.min, 1.0);
    const double unit_ball = 4.0 / 3.0 * std::numbers::pi;
    const double gamma = 2.0 * std::cbrt(1.0 + 1.0 / 3.0) * std::cbrt(volume / unit_ball);

    auto try_goal = [&](std::size_t node) {
        return distance(tree.pos[node], req.goal) <= req.step &&
               !edge_collides(tree.pos[node], req.goal, req.zones, req.clearance);
    };
    if (try_goal(0)) return {req.start, req.goal};

    while (tree.pos.size() < req.max_nodes) {
        // Four draws per iteration no matter what, so RRT and RRT* consume
        // the generator identically.
        const double bias = unit(rng);
        const Vec3 uniform{area.lo.x + unit(rng) * area.width(), area.lo.y + unit(rng) * area.height(),
                           req.band.min + unit(rng) * (req.band.max - req.band.min)};
        const Vec3 sample = bias < req.goal_bias ? req.goal : uniform;

        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tree.pos.size(); ++i) {
            const double d = distance(tree.pos[i], sample);
            if (d < best) { best = d; nearest = i; }
        }
        if (best <= 0.0) continue;
        const Vec3 from = tree.pos[nearest];
        const Vec3 to = best <= req.step ? sample : from + (sample - from) * (req.step / best);
        if (edge_collides(from, to, req.zones, req.clearance)) continue;

        std::size_t node;
        if constexpr (!Star) {
            node = tree.add(to, nearest, tree.cost[nearest] + distance(from, to));
            if (try_goal(node)) return tree.path_to(node, req.goal);
        } else {
            const double n = static_cast<double>(tree.pos.size() + 1);
            const double radius = std::min(gamma * std::cbrt(std::log(n) / n), 5.0 * req.step);
            std::vector<std::size_t> near;
            for (std::size_t i = 0; i < tree.pos.size(); ++i)
                if (distance(tree.pos[i], to) <= radius) near.push_back(i);

            std::size_t parent = nearest;
            double cost = tree.cost[nearest] + distance(from, to);
            for (std::size_t i : near) {
                const double c = tree.cost[i] + distance(tree.pos[i], to);
                if (c < cost && !edge_collides(tree.pos[i], to, req.zones, req.clearance)) {
                    cost = c;
                    parent = i;
                }
            }
            node = tree.add(to, parent, cost);
            for (std::size_t i : near) {
                if (i == parent) continue;
                const double c = cost + distance(to, tree.pos[i]);
                if (c < tree.cost[i] && !edge_collides(to, tree.pos[i], req.zones, req.clearance))
                    tree.reparent(i, node, c);
            }
            if (try_goal(node)) goal_links.push_back(node);
        }
    }

    if constexpr (Star) {
        if (!goal_links.empty()) {
            std::size_t best_node = goal_links.front();
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t g : goal_links) {
                const double c = tree.cost[g] + distance(tree.pos[g], req.goal);
                if (c < best_cost) { best_cost = c; best_node = g; }
            }
            return tree.path_to(best_node, req.goal);
        }
    }
    throw PlanningFailure("RRT exhausted max_nodes without reaching the goal", tree.pos.size());
}

} // namespace

bool point_collides(const Vec3& p, std::span<const NoFlyZone> zones, double clearance) {
    if (p.z < clearance) return true;
    for (const auto& z : zones)
        if (z.contains(p.xy())) return true;
    return false;
}

bool edge_collides(const Vec3& a, const Vec3& b, std::span<const NoFlyZone> zones, double clearance) {
    if (a.z < clearance || b.z < clearance) return true;
    const Vec2 a2 = a.xy(), d = b.xy() - a.xy();
    const double len2 = dot(d, d);
    for (const auto& z : zones) {
        double t = len2 > 0.0 ? dot(z.center - a2, d) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        if (distance(a2 + d * t, z.center) < z.radius) return true;
    }
    return false;
}

double polyline_length(std::span<const Vec3> pts) {
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
    return s;
}

std::vector<Vec3> rrt_plan(const RrtRequest& req) { return plan<false>(req); }
std::vector<Vec3> rrt_star_plan(const RrtRequest& req) { return plan<true>(req); }

} // namespace sarplan
