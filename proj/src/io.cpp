#include "sarplan/io.hpp"

#include "sarplan/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sarplan::io {
namespace {

std::ofstream open_out(const fs::path& path, bool binary = false) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

// Shortest round-trippable decimal form.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* mode_name(SearchMode m) {
    switch (m) {
    case SearchMode::Waypoint: return "waypoint";
    case SearchMode::Gradient: return "gradient";
    case SearchMode::Exhausted: return "timeout";
    }
    return "?";
}

} // namespace

void write_grid_csv(const fs::path& path, const GridLattice& g, std::span<const double> values) {
    auto out = open_out(path);
    out << "# origin_x=" << num(g.origin.x) << ",origin_y=" << num(g.origin.y)
        << ",cell_size=" << num(g.cell_size) << ",nx=" << g.nx << ",ny=" << g.ny << '\n';
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            if (ix) out << ',';
            out << num(values[g.index(ix, iy)]);
        }
        out << '\n';
    }
}

TerrainGrid read_terrain_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (header.rfind("# ", 0) != 0) throw InvalidArgument("grid CSV is missing its header line");
    TerrainGrid grid;
    std::istringstream hs(header.substr(2));
    std::string field;
    while (std::getline(hs, field, ',')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw InvalidArgument("malformed grid CSV header");
        const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "origin_x") grid.lattice.origin.x = std::stod(val);
        else if (key == "origin_y") grid.lattice.origin.y = std::stod(val);
        else if (key == "cell_size") grid.lattice.cell_size = std::stod(val);
        else if (key == "nx") grid.lattice.nx = std::stoul(val);
        else if (key == "ny") grid.lattice.ny = std::stoul(val);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) grid.heights.push_back(std::stod(field));
    }
    grid.validate();
    return grid;
}

void write_grid_pgm(const fs::path& path, const GridLattice& g, std::span<const double> values) {
    auto out = open_out(path, true);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    for (std::size_t r = 0; r < g.ny; ++r) {
        const std::size_t iy = g.ny - 1 - r;
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const double u = hi > lo ? (values[g.index(ix, iy)] - lo) / (hi - lo) : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(u * 255.0))));
        }
    }
}

nlohmann::json grid_to_json(const GridLattice& g, std::span<const double> values) {
    return {{"origin", {g.origin.x, g.origin.y}},
            {"cell_size", g.cell_size},
            {"nx", g.nx},
            {"ny", g.ny},
            {"values", std::vector<double>(values.begin(), values.end())}};
}

void write_searcher_csv(const fs::path& path, const SearcherPath& s) {
    auto out = open_out(path);
    out << "t,x,y,mode\n";
    for (const auto& p : s.samples)
        out << num(p.t) << ',' << num(p.p.x) << ',' << num(p.p.y) << ',' << mode_name(p.mode) << '\n';
}

void write_posterior_csv(const fs::path& path, const GPPosterior& post) {
    auto out = open_out(path);
    out << "x,y,mean,var\n";
    for (std::size_t i = 0; i < post.cells.size(); ++i)
        out << num(post.cells[i].x) << ',' << num(post.cells[i].y) << ',' << num(post.mean[i]) << ','
            << num(post.var[i]) << '\n';
}

nlohmann::json trajectories_to_json(const TrajectorySet& traj) {
    nlohmann::json uavs = nlohmann::json::array();
    for (const auto& u : traj.uavs) {
        nlohmann::json ctrl = nlohmann::json::array();
        for (const auto& c : u.control) ctrl.push_back({c.x, c.y, c.z});
        uavs.push_back({{"control", ctrl}});
    }
    return {{"altitude_band", {traj.band.min, traj.band.max}}, {"uavs", uavs}};
}

TrajectorySet trajectories_from_json(const nlohmann::json& j) {
    TrajectorySet traj;
    try {
        const auto band = j.at("altitude_band");
        traj.band = {band.at(0).get<double>(), band.at(1).get<double>()};
        for (const auto& u : j.at("uavs")) {
            std::vector<Vec3> ctrl;
            for (const auto& c : u.at("control"))
                ctrl.push_back({c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()});
            traj.uavs.push_back(UavPath::from_control(std::move(ctrl)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed trajectory JSON: ") + e.what());
    }
    traj.validate();
    return traj;
}

void write_trajectory_samples_csv(const fs::path& path, const TrajectorySet& traj, std::size_t per_uav) {
    auto out = open_out(path);
    out << "uav,t,x,y,z\n";
    per_uav = std::max<std::size_t>(per_uav, 2);
    for (std::size_t u = 0; u < traj.uavs.size(); ++u)
        for (std::size_t i = 0; i < per_uav; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(per_uav - 1);
            const Vec3 p = eval(traj.uavs[u], t);
            out << u << ',' << num(t) << ',' << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << '\n';
        }
}

void write_polyline_csv(const fs::path& path, std::span<const std::vector<Vec3>> polylines) {
    auto out = open_out(path);
    out << "uav,index,x,y,z\n";
    for (std::size_t u = 0; u < polylines.size(); ++u)
        for (std::size_t i = 0; i < polylines[u].size(); ++i) {
            const Vec3& p = polylines[u][i];
            out << u << ',' << i << ',' << num(p.x) << ',' << num(p.y) << ',' << num(p.z) << '\n';
        }
}

void write_iteration_log_csv(const fs::path& path, std::span<const IterationRecord> log) {
    auto out = open_out(path);
    out << "iter,F,R,L,S,feasible\n";
    for (const auto& r : log)
        out << r.iter << ',' << num(r.report.objective) << ',' << num(r.report.risk) << ','
            << num(r.report.length_cost) << ',' << num(r.report.smooth_cost) << ',' << r.feasible << '\n';
}

nlohmann::json report_to_json(const RiskReport& r) {
    return {{"risk", r.risk},
            {"length_cost", r.length_cost},
            {"smooth_cost", r.smooth_cost},
            {"objective", r.objective},
            {"planning_time", r.planning_time}};
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

void write_json(const fs::path& path, const nlohmann::json& j) { open_out(path) << j.dump(2) << '\n'; }

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
}

} // namespace sarplan::io
