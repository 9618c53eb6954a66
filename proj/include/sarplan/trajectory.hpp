#pragma once

#include "sarplan/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sarplan {

// Allowed altitude band (height above terrain, m) for UAV control points.
struct AltitudeBand {
    double min = 5.0;
    double max = 60.0;
};

// One UAV's composite cubic Bezier: 3K+1 control points, segment s using
// points 3s..3s+3. Coordinates are (x, y, altitude above terrain).
struct UavPath {
    std::vector<Vec3> control;
    Vec3 start;
    Vec3 goal;

    static UavPath from_control(std::vector<Vec3> control);
    std::size_t segments() const { return control.empty() ? 0 : (control.size() - 1) / 3; }
};

// The optimizer's parameter matrix: every UAV's control points. Interior
// points are free; first and last are pinned to start/goal.
struct TrajectorySet {
    std::vector<UavPath> uavs;
    AltitudeBand band;

    // Throws InvalidArgument on a broken control-point count, unpinned
    // endpoints, or control altitudes outside the band.
    void validate() const;

    std::size_t free_parameter_count() const;
    std::vector<double> free_parameters() const;
    void set_free_parameters(std::span<const double> values);
    // Re-pin endpoints and clamp control altitudes into the band.
    void project();
};

Vec3 eval(const UavPath& path, double t);
Vec3 eval(const TrajectorySet& traj, std::size_t uav, double t);
// d/dt of the composite curve (t is the global parameter).
Vec3 eval_derivative(const UavPath& path, double t);

// Adaptive chord/control-polygon subdivision; per segment the estimate
// (chord + polygon) / 2 is refined while polygon - chord > 1e-6 * polygon.
double arc_length(const UavPath& path);
double arc_length(const TrajectorySet& traj, std::size_t uav);
double total_arc_length(const TrajectorySet& traj);

// Sum over UAVs of squared second differences of the control sequence.
double smoothness(const TrajectorySet& traj);
double smoothness(const UavPath& path);

// Dense polyline approximation, `per_segment` chords per cubic segment.
std::vector<Vec3> flatten(const UavPath& path, std::size_t per_segment);

// Points every `spacing` meters of arc length, starting at the first control
// point (s = 0, spacing, 2*spacing, ... <= length).
std::vector<Vec3> sample_by_arc_length(const UavPath& path, double spacing);
std::vector<Vec3> resample_polyline(std::span<const Vec3> points, double spacing);

struct PolylineFit {
    UavPath path;
    double rms = 0.0;
};

// Least-squares K-segment composite cubic through `points` with both
// endpoints interpolated. Parameters start from normalised chord length and
// are refined by closest-point correction. `smoothing` > 0 adds that multiple
// of the mean data weight as a penalty on control-point second differences
// and keeps the chord-length parameters as they are.
PolylineFit fit_to_polyline(std::span<const Vec3> points, std::size_t segments, double smoothing = 0.0);

} // namespace sarplan
