#include "sarplan/scenario.hpp"

#include "sarplan/errors.hpp"

namespace sarplan {
namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& field) {
    if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

void read_vec2(const json& j, const char* key, Vec2& v) {
    if (auto it = j.find(key); it != j.end()) v = {it->at(0).get<double>(), it->at(1).get<double>()};
}

json vec2(const Vec2& v) { return {v.x, v.y}; }

json sector_json(const Sector& s) {
    return {{"bounds", {s.bounds.lo.x, s.bounds.lo.y, s.bounds.hi.x, s.bounds.hi.y}},
            {"entry", vec2(s.entry)},
            {"exit", vec2(s.exit)}};
}

Sector sector_from(const json& j) {
    Sector s;
    const auto& b = j.at("bounds");
    s.bounds = {{b.at(0).get<double>(), b.at(1).get<double>()}, {b.at(2).get<double>(), b.at(3).get<double>()}};
    read_vec2(j, "entry", s.entry);
    read_vec2(j, "exit", s.exit);
    return s;
}

std::vector<Sector> halves(double w, double h) {
    const double margin = 5.0;
    return {Sector{{{0.0, 0.0}, {w / 2, h}}, {w / 4, margin}, {w / 4, h - margin}},
            Sector{{{w / 2, 0.0}, {w, h}}, {3 * w / 4, margin}, {3 * w / 4, h - margin}}};
}

} // namespace

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.sectors = halves(c.terrain.extent.x, c.terrain.extent.y);
    c.start.mean = c.terrain.extent * 0.5;
    c.objective.C_time = 2400.0;
    // Three footprints at the top of the altitude band.
    c.morton.cutoff = 3.0 * c.gp.horizontal_lengthscale(c.band.max);
    return c;
}

ScenarioConfig desk_config() {
    ScenarioConfig c = default_config();
    c.terrain.extent = {200.0, 200.0};
    c.terrain.amplitude = 15.0;
    c.sectors = halves(200.0, 200.0);
    c.start.mean = {100.0, 100.0};
    c.mc_iterations = 2000;
    c.objective.C_time = 1200.0;
    c.optimizer.max_iters = 150;
    return c;
}

void ScenarioConfig::validate() const {
    if (!(terrain.cell_size > 0.0) || !(terrain.extent.x > 0.0) || !(terrain.extent.y > 0.0))
        throw InvalidArgument("terrain: cell_size and extent must be positive");
    lost_person.validate();
    searcher.validate();
    gp.validate();
    objective.validate();
    optimizer.validate();
    const Rect area{{0.0, 0.0}, terrain.extent};
    if (!area.contains(start.mean)) throw InvalidArgument("start.mean lies outside the terrain");
    if (mc_iterations < 1) throw InvalidArgument("mc_iterations must be >= 1");
    if (!(lawnmower_spacing > 0.0)) throw InvalidArgument("lawnmower_spacing must be positive");
    for (const auto& s : sectors) {
        s.validate();
        if (!area.contains(s.bounds.lo) || !area.contains(s.bounds.hi))
            throw InvalidArgument("sector extends beyond the terrain");
    }
    if (uav_count > 0 && sectors.empty()) throw InvalidArgument("UAVs need at least one sector");
    if (segments < 1) throw InvalidArgument("segments must be >= 1");
    if (!(fit_smoothing >= 0.0)) throw InvalidArgument("rrt.fit_smoothing must be >= 0");
    if (!(band.min <= band.max)) throw InvalidArgument("altitude band is inverted");
    if (takeoff_altitude < band.min || takeoff_altitude > band.max)
        throw InvalidArgument("takeoff_altitude must lie in the altitude band");
    if (!(sample_spacing > 0.0)) throw InvalidArgument("sample_spacing must be positive");
    if (risk.mu < 0.0) throw InvalidArgument("risk.mu must be >= 0");
    if (!(rrt_step > 0.0)) throw InvalidArgument("rrt_step must be positive");
    if (init_from != "rrt" && init_from != "rrt_star")
        throw InvalidArgument("init_from must be \"rrt\" or \"rrt_star\"");
    if (morton.block < 1 || !(morton.cutoff > 0.0)) throw InvalidArgument("invalid Morton settings");
    for (const auto& z : zones) {
        if (!(z.radius > 0.0)) throw InvalidArgument("no-fly zone radius must be positive");
        for (const auto& s : sectors)
            if (z.contains(s.entry) || z.contains(s.exit))
                throw InvalidArgument("a sector entry/exit lies inside a no-fly zone");
    }
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
    json sectors = json::array();
    for (const auto& s : c.sectors) sectors.push_back(sector_json(s));
    json zones = json::array();
    for (const auto& z : c.zones) zones.push_back({{"center", vec2(z.center)}, {"radius", z.radius}});
    const auto& lp = c.lost_person;
    const auto& sp = c.searcher;
    const auto& o = c.optimizer;
    return {
        {"seed", c.seed},
        {"terrain", {{"extent", vec2(c.terrain.extent)}, {"cell_size", c.terrain.cell_size},
                     {"amplitude", c.terrain.amplitude}, {"roughness", c.terrain.roughness}}},
        {"lost_person", {{"m", lp.mass}, {"a", lp.friction}, {"b", lp.self_accel}, {"alpha", lp.env_gain},
                         {"beta", lp.noise_gain}, {"dt", lp.dt}, {"horizon", lp.horizon},
                         {"start_mean", vec2(c.start.mean)}, {"start_std", c.start.std},
                         {"start_velocity", vec2(c.start.initial_velocity)},
                         {"iterations", c.mc_iterations}}},
        {"sectors", sectors},
        {"lawnmower_spacing", c.lawnmower_spacing},
        {"searcher", {{"speed", sp.speed}, {"waypoint_radius", sp.waypoint_radius},
                      {"slope_threshold", sp.slope_threshold}, {"tenacity_growth", sp.tenacity_growth},
                      {"dt", sp.dt}, {"max_steps", sp.max_steps}}},
        {"uav", {{"count", c.uav_count}, {"segments", c.segments}, {"alt_min", c.band.min},
                 {"alt_max", c.band.max}, {"takeoff_altitude", c.takeoff_altitude},
                 {"manual_altitude", c.manual_altitude}}},
        {"gp", {{"sigma_f", c.gp.sigma_f}, {"l0", c.gp.l0}, {"gamma", c.gp.gamma}, {"l_vert", c.gp.l_vert},
                {"noise0", c.gp.noise0}, {"noise_alt", c.gp.noise_alt}, {"sample_spacing", c.sample_spacing},
                {"sensor_height_ground", c.sensor_height_ground}}},
        {"risk", {{"mu", c.risk.mu}}},
        {"objective", {{"alpha_L", c.objective.alpha_L}, {"alpha_S", c.objective.alpha_S},
                       {"C_time", c.objective.C_time}, {"C_smooth", c.objective.C_smooth}}},
        {"optimizer", {{"eta", o.eta}, {"beta1", o.beta1}, {"beta2", o.beta2}, {"eps", o.eps},
                       {"fd_step", o.fd_step}, {"max_iters", o.max_iters}, {"rel_tol", o.rel_tol},
                       {"patience", o.patience}, {"zone_penalty_weight", o.zone_penalty_weight}}},
        {"rrt", {{"step", c.rrt_step}, {"max_nodes", c.rrt_max_nodes}, {"star_nodes", c.rrt_star_nodes},
                 {"init_from", c.init_from}, {"fit_smoothing", c.fit_smoothing}}},
        {"sparse", {{"enabled", c.sparse}, {"block", c.morton.block}, {"cutoff", c.morton.cutoff}}},
        {"zones", zones},
        {"output_dir", c.output_dir},
    };
}

ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioConfig c) {
    // A new extent without explicit sectors or start gets them re-derived.
    const Vec2 base_extent = c.terrain.extent;
    try {
        read(j, "seed", c.seed);
        if (auto t = j.find("terrain"); t != j.end()) {
            read_vec2(*t, "extent", c.terrain.extent);
            read(*t, "cell_size", c.terrain.cell_size);
            read(*t, "amplitude", c.terrain.amplitude);
            read(*t, "roughness", c.terrain.roughness);
        }
        if (auto l = j.find("lost_person"); l != j.end()) {
            auto& lp = c.lost_person;
            read(*l, "m", lp.mass);
            read(*l, "a", lp.friction);
            read(*l, "b", lp.self_accel);
            read(*l, "alpha", lp.env_gain);
            read(*l, "beta", lp.noise_gain);
            read(*l, "dt", lp.dt);
            read(*l, "horizon", lp.horizon);
            read_vec2(*l, "start_mean", c.start.mean);
            read(*l, "start_std", c.start.std);
            read_vec2(*l, "start_velocity", c.start.initial_velocity);
            read(*l, "iterations", c.mc_iterations);
        }
        if (auto s = j.find("sectors"); s != j.end()) {
            c.sectors.clear();
            for (const auto& e : *s) c.sectors.push_back(sector_from(e));
        } else if (c.terrain.extent != base_extent) {
            c.sectors = halves(c.terrain.extent.x, c.terrain.extent.y);
        }
        const auto lp = j.find("lost_person");
        if (c.terrain.extent != base_extent && (lp == j.end() || !lp->contains("start_mean")))
            c.start.mean = c.terrain.extent * 0.5;
        read(j, "lawnmower_spacing", c.lawnmower_spacing);
        if (auto s = j.find("searcher"); s != j.end()) {
            read(*s, "speed", c.searcher.speed);
            read(*s, "waypoint_radius", c.searcher.waypoint_radius);
            read(*s, "slope_threshold", c.searcher.slope_threshold);
            read(*s, "tenacity_growth", c.searcher.tenacity_growth);
            read(*s, "dt", c.searcher.dt);
            read(*s, "max_steps", c.searcher.max_steps);
        }
        if (auto u = j.find("uav"); u != j.end()) {
            read(*u, "count", c.uav_count);
            read(*u, "segments", c.segments);
            read(*u, "alt_min", c.band.min);
            read(*u, "alt_max", c.band.max);
            read(*u, "takeoff_altitude", c.takeoff_altitude);
            read(*u, "manual_altitude", c.manual_altitude);
        }
        if (auto g = j.find("gp"); g != j.end()) {
            read(*g, "sigma_f", c.gp.sigma_f);
            read(*g, "l0", c.gp.l0);
            read(*g, "gamma", c.gp.gamma);
            read(*g, "l_vert", c.gp.l_vert);
            read(*g, "noise0", c.gp.noise0);
            read(*g, "noise_alt", c.gp.noise_alt);
            read(*g, "sample_spacing", c.sample_spacing);
            read(*g, "sensor_height_ground", c.sensor_height_ground);
        }
        if (auto r = j.find("risk"); r != j.end()) read(*r, "mu", c.risk.mu);
        if (auto o = j.find("objective"); o != j.end()) {
            read(*o, "alpha_L", c.objective.alpha_L);
            read(*o, "alpha_S", c.objective.alpha_S);
            read(*o, "C_time", c.objective.C_time);
            read(*o, "C_smooth", c.objective.C_smooth);
        }
        if (auto o = j.find("optimizer"); o != j.end()) {
            auto& oc = c.optimizer;
            read(*o, "eta", oc.eta);
            read(*o, "beta1", oc.beta1);
            read(*o, "beta2", oc.beta2);
            read(*o, "eps", oc.eps);
            read(*o, "fd_step", oc.fd_step);
            read(*o, "max_iters", oc.max_iters);
            read(*o, "rel_tol", oc.rel_tol);
            read(*o, "patience", oc.patience);
            read(*o, "zone_penalty_weight", oc.zone_penalty_weight);
        }
        if (auto r = j.find("rrt"); r != j.end()) {
            read(*r, "step", c.rrt_step);
            read(*r, "max_nodes", c.rrt_max_nodes);
            read(*r, "star_nodes", c.rrt_star_nodes);
            read(*r, "init_from", c.init_from);
            read(*r, "fit_smoothing", c.fit_smoothing);
        }
        if (auto s = j.find("sparse"); s != j.end()) {
            read(*s, "enabled", c.sparse);
            read(*s, "block", c.morton.block);
            read(*s, "cutoff", c.morton.cutoff);
        }
        if (auto z = j.find("zones"); z != j.end()) {
            c.zones.clear();
            for (const auto& e : *z) {
                NoFlyZone zone;
                read_vec2(e, "center", zone.center);
                zone.radius = e.at("radius").get<double>();
                c.zones.push_back(zone);
            }
        }
        read(j, "output_dir", c.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    return c;
}

} // namespace sarplan
