// sarplan: command-line front end for the search planning pipeline.

#include "sarplan/errors.hpp"
#include "sarplan/io.hpp"
#include "sarplan/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace sarplan;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kPlanning = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string sparse;
    std::string format = "csv";
};

ScenarioConfig resolve(const Options& opt) {
    ScenarioConfig cfg = default_config();
    if (!opt.config_path.empty()) cfg = config_from_json(io::read_json(opt.config_path), cfg);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.sparse == "on") cfg.sparse = true;
    if (opt.sparse == "off") cfg.sparse = false;
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    cfg.validate();
    return cfg;
}

void write_grid(const fs::path& dir, const std::string& stem, const std::string& format,
                const GridLattice& lattice, std::span<const double> values) {
    if (format == "csv") io::write_grid_csv(dir / (stem + ".csv"), lattice, values);
    else if (format == "pgm") io::write_grid_pgm(dir / (stem + ".pgm"), lattice, values);
    else io::write_json(dir / (stem + ".json"), io::grid_to_json(lattice, values));
}

void write_meta(const fs::path& dir, const ScenarioConfig& cfg) {
    io::write_json(dir / "meta.json", meta_json(cfg));
}

void cmd_terrain(const Options& opt) {
    const auto cfg = resolve(opt);
    const auto terrain = generate_terrain(cfg.seed, cfg.terrain);
    const fs::path dir = cfg.output_dir;
    write_grid(dir, "terrain", opt.format, terrain.lattice, terrain.heights);
    write_meta(dir, cfg);
}

void cmd_heatmap(const Options& opt) {
    const auto cfg = resolve(opt);
    const auto terrain = generate_terrain(cfg.seed, cfg.terrain);
    const auto heat = simulate_heatmap(cfg.lost_person, terrain, cfg.start, cfg.mc_iterations,
                                       rollout_seed(cfg.seed, 0x4C50));
    const fs::path dir = cfg.output_dir;
    write_grid(dir, "terrain", opt.format, terrain.lattice, terrain.heights);
    write_grid(dir, "heatmap", opt.format, heat.lattice, heat.probs);
    write_meta(dir, cfg);
}

void cmd_searchers(const Options& opt) {
    if (opt.format == "pgm") throw InvalidArgument("searcher tracks cannot be written as pgm");
    const auto cfg = resolve(opt);
    const auto terrain = generate_terrain(cfg.seed, cfg.terrain);
    const fs::path dir = cfg.output_dir;
    nlohmann::json all = nlohmann::json::array();
    for (std::size_t i = 0; i < cfg.sectors.size(); ++i) {
        const auto wps = lawnmower_waypoints(cfg.sectors[i], cfg.lawnmower_spacing);
        const auto path = simulate_searcher(cfg.sectors[i], wps, cfg.searcher, terrain);
        if (opt.format == "csv") {
            io::write_searcher_csv(dir / ("searcher_" + std::to_string(i) + ".csv"), path);
        } else {
            nlohmann::json samples = nlohmann::json::array();
            for (const auto& s : path.samples) samples.push_back({s.t, s.p.x, s.p.y, static_cast<int>(s.mode)});
            all.push_back({{"waypoints_captured", path.waypoints_captured},
                           {"waypoints_total", path.waypoints_total},
                           {"completed", path.completed},
                           {"samples", samples}});
        }
    }
    if (opt.format == "json") io::write_json(dir / "searchers.json", all);
    write_meta(dir, cfg);
}

void cmd_plan(const Options& opt) {
    const auto cfg = resolve(opt);
    const auto outcome = run_plan(cfg, cfg.output_dir);
    const auto& r = outcome.report;
    std::printf("risk=%.6g length=%.6g smooth=%.6g objective=%.6g time=%.3fs\n", r.risk, r.length_cost,
                r.smooth_cost, r.objective, r.planning_time);
}

void cmd_compare(const Options& opt) {
    const auto cfg = resolve(opt);
    const auto table = compare_baselines(cfg, cfg.output_dir);
    for (const auto& row : table.rows) {
        std::printf("%-14s %12.6g %7.2f%%  ", row.scenario.c_str(), row.risk, row.pct_of_max);
        if (row.planning_time) std::printf("%.3fs\n", *row.planning_time);
        else std::printf("N/A\n");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV search planning around ground searchers"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON configuration file");
        sub->add_option("--seed", opt.seed, "override the configured seed");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--sparse", opt.sparse, "sparse GP approximation")->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--format", opt.format, "grid output format")->check(CLI::IsMember({"csv", "json", "pgm"}));
    };

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const Options&);
    };
    const Command commands[] = {
        {"generate-terrain", "fractal terrain grid", cmd_terrain},
        {"heatmap", "lost-person probability heatmap", cmd_heatmap},
        {"searchers", "ground searcher tracks", cmd_searchers},
        {"plan", "risk-optimised UAV trajectories", cmd_plan},
        {"compare", "four-scenario baseline comparison", cmd_compare},
    };
    void (*chosen)(const Options&) = nullptr;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub);
        sub->callback([&chosen, run = c.run] { chosen = run; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        chosen(opt);
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const PlanningFailure& e) {
        std::cerr << "planning failed: " << e.what() << '\n';
        return kPlanning;
    } catch (const NumericalFailure& e) {
        std::cerr << "planning failed: " << e.what() << '\n';
        return kPlanning;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}
