#pragma once

#include "sarplan/lost_person.hpp"
#include "sarplan/planner.hpp"
#include "sarplan/risk_objective.hpp"
#include "sarplan/searcher.hpp"
#include "sarplan/sensing_gp.hpp"
#include "sarplan/terrain.hpp"
#include "sarplan/trajectory.hpp"

#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace sarplan::io {

namespace fs = std::filesystem;

// Grid CSV: one header line
//   # origin_x=<v>,origin_y=<v>,cell_size=<v>,nx=<n>,ny=<n>
// then ny rows (iy = 0 first) of nx comma-separated values.
void write_grid_csv(const fs::path& path, const GridLattice& lattice, std::span<const double> values);
TerrainGrid read_terrain_csv(const fs::path& path);
// 8-bit binary PGM, values normalised to [0, 255], top row is the highest y.
void write_grid_pgm(const fs::path& path, const GridLattice& lattice, std::span<const double> values);
nlohmann::json grid_to_json(const GridLattice& lattice, std::span<const double> values);

void write_searcher_csv(const fs::path& path, const SearcherPath& searcher);
void write_posterior_csv(const fs::path& path, const GPPosterior& post);

nlohmann::json trajectories_to_json(const TrajectorySet& traj);
TrajectorySet trajectories_from_json(const nlohmann::json& j);
// uav,t,x,y,z with `per_uav` evenly spaced parameter samples per UAV.
void write_trajectory_samples_csv(const fs::path& path, const TrajectorySet& traj, std::size_t per_uav);
void write_polyline_csv(const fs::path& path, std::span<const std::vector<Vec3>> polylines);

void write_iteration_log_csv(const fs::path& path, std::span<const IterationRecord> log);
nlohmann::json report_to_json(const RiskReport& report);

void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

} // namespace sarplan::io
