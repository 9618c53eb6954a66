#include "sarplan/trajectory.hpp"

#include "sarplan/errors.hpp"
#include "sarplan/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sarplan {
namespace {

using Segment = std::array<Vec3, 4>;

Segment segment_of(const UavPath& path, std::size_t s) {
    const auto& c = path.control;
    return {c[3 * s], c[3 * s + 1], c[3 * s + 2], c[3 * s + 3]};
}

// Global parameter -> (segment, local parameter).
std::pair<std::size_t, double> locate(std::size_t k, double t) {
    const double scaled = t * static_cast<double>(k);
    std::size_t s = static_cast<std::size_t>(std::floor(scaled));
    if (s >= k) s = k - 1;
    return {s, scaled - static_cast<double>(s)};
}

Vec3 bernstein(const Segment& p, double u) {
    const double v = 1.0 - u;
    return p[0] * (v * v * v) + p[1] * (3.0 * v * v * u) + p[2] * (3.0 * v * u * u) + p[3] * (u * u * u);
}

double segment_length(const Segment& p, int depth) {
    const double chord = distance(p[0], p[3]);
    const double poly = distance(p[0], p[1]) + distance(p[1], p[2]) + distance(p[2], p[3]);
    if (poly - chord <= 1e-6 * poly || depth >= 30) return 0.5 * (chord + poly);
    // de Casteljau split at u = 1/2
    const Vec3 p01 = 0.5 * (p[0] + p[1]);
    const Vec3 p12 = 0.5 * (p[1] + p[2]);
    const Vec3 p23 = 0.5 * (p[2] + p[3]);
    const Vec3 p012 = 0.5 * (p01 + p12);
    const Vec3 p123 = 0.5 * (p12 + p23);
    const Vec3 mid = 0.5 * (p012 + p123);
    return segment_length({p[0], p01, p012, mid}, depth + 1) +
           segment_length({mid, p123, p23, p[3]}, depth + 1);
}

void check_path(const UavPath& path) {
    if (path.control.size() < 4 || (path.control.size() - 1) % 3 != 0)
        throw InvalidArgument("a UAV path needs 3K+1 control points with K >= 1");
}

} // namespace

UavPath UavPath::from_control(std::vector<Vec3> control) {
    UavPath p;
    p.control = std::move(control);
    check_path(p);
    p.start = p.control.front();
    p.goal = p.control.back();
    return p;
}

void TrajectorySet::validate() const {
    if (!(band.min <= band.max)) throw InvalidArgument("altitude band is inverted");
    for (const auto& u : uavs) {
        check_path(u);
        if (!(u.control.front() == u.start) || !(u.control.back() == u.goal))
            throw InvalidArgument("UAV endpoints are not pinned");
        for (const auto& c : u.control)
            if (c.z < band.min || c.z > band.max)
                throw InvalidArgument("control point altitude outside the band");
    }
}

std::size_t TrajectorySet::free_parameter_count() const {
    std::size_t n = 0;
    for (const auto& u : uavs) n += 3 * (u.control.size() - 2);
    return n;
}

std::vector<double> TrajectorySet::free_parameters() const {
    std::vector<double> out;
    out.reserve(free_parameter_count());
    for (const auto& u : uavs)
        for (std::size_t i = 1; i + 1 < u.control.size(); ++i) {
            out.push_back(u.control[i].x);
            out.push_back(u.control[i].y);
            out.push_back(u.control[i].z);
        }
    return out;
}

void TrajectorySet::set_free_parameters(std::span<const double> values) {
    if (values.size() != free_parameter_count())
        throw InvalidArgument("parameter vector has the wrong length");
    std::size_t k = 0;
    for (auto& u : uavs)
        for (std::size_t i = 1; i + 1 < u.control.size(); ++i) {
            u.control[i] = {values[k], values[k + 1], values[k + 2]};
            k += 3;
        }
}

void TrajectorySet::project() {
    for (auto& u : uavs) {
        u.control.front() = u.start;
        u.control.back() = u.goal;
        for (std::size_t i = 1; i + 1 < u.control.size(); ++i)
            u.control[i].z = std::clamp(u.control[i].z, band.min, band.max);
    }
}

Vec3 eval(const UavPath& path, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("curve parameter must lie in [0, 1]");
    check_path(path);
    if (t == 0.0) return path.control.front();
    if (t == 1.0) return path.control.back();
    const auto [s, u] = locate(path.segments(), t);
    return bernstein(segment_of(path, s), u);
}

Vec3 eval(const TrajectorySet& traj, std::size_t uav, double t) { return eval(traj.uavs.at(uav), t); }

Vec3 eval_derivative(const UavPath& path, double t) {
    check_path(path);
    const std::size_t k = path.segments();
    const auto [s, u] = locate(k, std::clamp(t, 0.0, 1.0));
    const Segment p = segment_of(path, s);
    const double v = 1.0 - u;
    const Vec3 d = (p[1] - p[0]) * (3.0 * v * v) + (p[2] - p[1]) * (6.0 * v * u) +
                   (p[3] - p[2]) * (3.0 * u * u);
    return d * static_cast<double>(k);
}

double arc_length(const UavPath& path) {
    check_path(path);
    double total = 0.0;
    for (std::size_t s = 0; s < path.segments(); ++s) total += segment_length(segment_of(path, s), 0);
    return total;
}

double arc_length(const TrajectorySet& traj, std::size_t uav) { return arc_length(traj.uavs.at(uav)); }

double total_arc_length(const TrajectorySet& traj) {
    double total = 0.0;
    for (const auto& u : traj.uavs) total += arc_length(u);
    return total;
}

double smoothness(const UavPath& path) {
    double s = 0.0;
    const auto& c = path.control;
    for (std::size_t j = 1; j + 1 < c.size(); ++j) {
        const Vec3 d = c[j + 1] - 2.0 * c[j] + c[j - 1];
        s += dot(d, d);
    }
    return s;
}

double smoothness(const TrajectorySet& traj) {
    double s = 0.0;
    for (const auto& u : traj.uavs) s += smoothness(u);
    return s;
}

std::vector<Vec3> flatten(const UavPath& path, std::size_t per_segment) {
    check_path(path);
    per_segment = std::max<std::size_t>(per_segment, 1);
    std::vector<Vec3> pts;
    pts.reserve(path.segments() * per_segment + 1);
    pts.push_back(path.control.front());
    for (std::size_t s = 0; s < path.segments(); ++s) {
        const Segment seg = segment_of(path, s);
        for (std::size_t i = 1; i <= per_segment; ++i)
            pts.push_back(bernstein(seg, static_cast<double>(i) / static_cast<double>(per_segment)));
    }
    return pts;
}

std::vector<Vec3> resample_polyline(std::span<const Vec3> points, double spacing) {
    if (!(spacing > 0.0)) throw InvalidArgument("sample spacing must be positive");
    std::vector<Vec3> out;
    if (points.empty()) return out;
    out.push_back(points.front());
    double next = spacing; // arc length of the next sample
    double walked = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const Vec3 a = points[i - 1];
        const Vec3 d = points[i] - a;
        const double len = norm(d);
        // Tolerance keeps exact multiples (100 m at 10 m spacing -> 11 samples).
        while (len > 0.0 && next <= walked + len + 1e-9 * (walked + len)) {
            const double f = std::min((next - walked) / len, 1.0);
            out.push_back(a + d * f);
            next += spacing;
        }
        walked += len;
    }
    return out;
}

std::vector<Vec3> sample_by_arc_length(const UavPath& path, double spacing) {
    // 64 chords per segment keeps the chord/arc discrepancy well under a
    // millimetre for the curve sizes used here.
    const std::vector<Vec3> dense = flatten(path, 64);
    return resample_polyline(dense, spacing);
}

PolylineFit fit_to_polyline(std::span<const Vec3> points, std::size_t k, double smoothing) {
    if (points.size() < 2) throw InvalidArgument("polyline fit needs at least two points");
    if (k < 1) throw InvalidArgument("polyline fit needs at least one segment");
    if (k > points.size() - 1)
        throw InvalidArgument("more segments than polyline edges: fit is underdetermined");
    if (!(smoothing >= 0.0)) throw InvalidArgument("fit smoothing must be >= 0");

    const std::size_t n_ctrl = 3 * k + 1;
    const std::size_t n_free = n_ctrl - 2;
    const Vec3 first = points.front();
    const Vec3 last = points.back();

    std::vector<double> params(points.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += distance(points[i - 1], points[i]);
        params[i] = total;
    }
    for (auto& t : params) t = total > 0.0 ? t / total : 0.0;
    if (total == 0.0)
        for (std::size_t i = 0; i < params.size(); ++i)
            params[i] = static_cast<double>(i) / static_cast<double>(params.size() - 1);
    params.back() = 1.0;

    auto basis = [&](double t, std::array<double, 4>& w) {
        const auto [s, u] = locate(k, t);
        const double v = 1.0 - u;
        w = {v * v * v, 3.0 * v * v * u, 3.0 * v * u * u, u * u * u};
        return 3 * s;
    };
    auto axis = [](const Vec3& v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; };

    // Weighted least squares over all free coordinates at once. Point i
    // contributes (B_i P - x_i)^T W_i (B_i P - x_i); W_i is the identity on
    // the first pass and afterwards the squared-distance weight
    // N + eps T T^T (normal plane plus a little tangential pull), which turns
    // the slow fit/reparametrise alternation into a Gauss-Newton step on the
    // distance to the curve.
    using Mat3 = std::array<std::array<double, 3>, 3>;
    const Mat3 identity{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    constexpr double tangential = 1e-4;
    std::vector<Mat3> weights(points.size(), identity);
    double reg = 0.0;

    UavPath path;
    path.control.assign(n_ctrl, first);
    path.control.back() = last;

    std::vector<Vec3> anchor;
    auto solve = [&] {
        const std::size_t n = 3 * n_free;
        linalg::SquareMatrix normal(n);
        std::vector<double> rhs(n, 0.0);
        std::array<double, 4> w{};
        double trace = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::size_t base = basis(params[i], w);
            Vec3 target = points[i];
            for (int a = 0; a < 4; ++a) {
                const std::size_t ca = base + a;
                if (ca == 0) target -= first * w[a];
                else if (ca == n_ctrl - 1) target -= last * w[a];
            }
            const Mat3& W = weights[i];
            for (int a = 0; a < 4; ++a) {
                const std::size_t ca = base + a;
                if (ca == 0 || ca == n_ctrl - 1) continue;
                trace += w[a] * w[a];
                for (int r = 0; r < 3; ++r) {
                    double wt = 0.0;
                    for (int c = 0; c < 3; ++c) wt += W[r][c] * axis(target, c);
                    rhs[3 * (ca - 1) + r] += w[a] * wt;
                }
                for (int b = 0; b < 4; ++b) {
                    const std::size_t cb = base + b;
                    if (cb == 0 || cb == n_ctrl - 1) continue;
                    for (int r = 0; r < 3; ++r)
                        for (int c = 0; c < 3; ++c)
                            normal(3 * (ca - 1) + r, 3 * (cb - 1) + c) += w[a] * w[b] * W[r][c];
                }
            }
        }
        // Second-difference penalty over the full control sequence. A tiny
        // multiple regularises control points no data point constrains; a
        // larger one trades residual for a calmer control polygon. The scale
        // is fixed on the first pass. With `anchor` set the penalty is on the
        // change from those second differences instead, which keeps the
        // system regular without biasing the converged fit.
        if (reg == 0.0)
            reg = std::max(smoothing, 1e-9) * std::max(trace / static_cast<double>(n_free), 1e-3);
        for (std::size_t j = 1; j + 1 < n_ctrl; ++j) {
            // stencil (j-1, j, j+1) with weights (1, -2, 1)
            const std::size_t idx[3] = {j - 1, j, j + 1};
            const double cw[3] = {1.0, -2.0, 1.0};
            Vec3 fixed = anchor.empty() ? Vec3{} : anchor[j] * -1.0;
            for (int a = 0; a < 3; ++a) {
                if (idx[a] == 0) fixed += first * cw[a];
                else if (idx[a] == n_ctrl - 1) fixed += last * cw[a];
            }
            for (int a = 0; a < 3; ++a) {
                if (idx[a] == 0 || idx[a] == n_ctrl - 1) continue;
                for (int r = 0; r < 3; ++r) rhs[3 * (idx[a] - 1) + r] -= reg * cw[a] * axis(fixed, r);
                for (int b = 0; b < 3; ++b) {
                    if (idx[b] == 0 || idx[b] == n_ctrl - 1) continue;
                    for (int r = 0; r < 3; ++r)
                        normal(3 * (idx[a] - 1) + r, 3 * (idx[b] - 1) + r) += reg * cw[a] * cw[b];
                }
            }
        }
        const auto chol = linalg::Cholesky::factor(normal);
        chol.forward_solve(rhs);
        chol.backward_solve(rhs);
        for (std::size_t i = 0; i < n_free; ++i)
            path.control[i + 1] = {rhs[3 * i], rhs[3 * i + 1], rhs[3 * i + 2]};
    };

    auto residual = [&] {
        double sq = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Vec3 r = eval(path, params[i]) - points[i];
            sq += dot(r, r);
        }
        return std::sqrt(sq / static_cast<double>(points.size()));
    };

    UavPath best;
    double best_rms = std::numeric_limits<double>::infinity();
    // Parameter correction only pays off when the fit can follow the data.
    const int passes = smoothing > 0.0 ? 1 : 100;
    int stale = 0;
    for (int outer = 0; outer < passes; ++outer) {
        solve();
        const double rms = residual();
        if (rms < best_rms * (1.0 - 1e-12)) {
            best_rms = rms;
            best = path;
            stale = 0;
        } else if (++stale >= 5) {
            break;
        }
        if (outer + 1 == passes || rms < 1e-12) break;

        if (smoothing == 0.0) {
            anchor.assign(n_ctrl, Vec3{});
            for (std::size_t j = 1; j + 1 < n_ctrl; ++j)
                anchor[j] = path.control[j + 1] - 2.0 * path.control[j] + path.control[j - 1];
        }

        // Closest-point parameter correction, then the squared-distance
        // weights at the corrected feet.
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (int it = 0; it < 10 && i > 0 && i + 1 < points.size(); ++it) {
                const double t = params[i];
                const auto [s, u] = locate(k, t);
                const Segment p = segment_of(path, s);
                const double v = 1.0 - u;
                const Vec3 c = bernstein(p, u);
                const Vec3 d1 = ((p[1] - p[0]) * (3.0 * v * v) + (p[2] - p[1]) * (6.0 * v * u) +
                                 (p[3] - p[2]) * (3.0 * u * u)) * static_cast<double>(k);
                const Vec3 d2 = ((p[2] - 2.0 * p[1] + p[0]) * (6.0 * v) +
                                 (p[3] - 2.0 * p[2] + p[1]) * (6.0 * u)) * static_cast<double>(k * k);
                const Vec3 r = c - points[i];
                const double denom = dot(d1, d1) + dot(r, d2);
                if (!(denom > 0.0)) break;
                // Stay between the neighbours so points never swap order.
                params[i] = std::clamp(t - dot(r, d1) / denom, params[i - 1], params[i + 1]);
                if (std::abs(params[i] - t) < 1e-15) break;
            }
            const Vec3 d = eval_derivative(path, params[i]);
            const double len = norm(d);
            if (!(len > 0.0)) {
                weights[i] = identity;
                continue;
            }
            const Vec3 tan = d * (1.0 / len);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    weights[i][r][c] = (r == c ? 1.0 : 0.0) - (1.0 - tangential) * axis(tan, r) * axis(tan, c);
        }
    }

    best.start = first;
    best.goal = last;
    return {best, best_rms};
}

} // namespace sarplan
