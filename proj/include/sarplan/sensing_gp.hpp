#pragma once

#include "sarplan/geometry.hpp"
#include "sarplan/linalg.hpp"
#include "sarplan/lost_person.hpp"
#include "sarplan/searcher.hpp"
#include "sarplan/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sarplan {

// Gibbs kernel with horizontal lengthscale l0 + gamma * altitude and a fixed
// vertical lengthscale. Observation noise variance is noise0 + noise_alt * alt^2.
struct GibbsKernelParams {
    double sigma_f = 1.0;
    double l0 = 8.0;
    double gamma = 0.8;
    double l_vert = 10.0;
    double noise0 = 1e-3;
    double noise_alt = 2e-5;

    void validate() const;
    double horizontal_lengthscale(double altitude) const { return l0 + gamma * altitude; }
    double noise_variance(double altitude) const { return noise0 + noise_alt * altitude * altitude; }
};

// p.z is altitude above terrain.
struct Observation {
    Vec3 p;
    double value = 0.0;
};

struct GPPosterior {
    std::vector<Vec2> cells;
    std::vector<double> mean;
    std::vector<double> var;
};

struct MortonConfig {
    std::size_t block = 16;
    double cutoff = 150.0; // m, between tile centroids
};

double gibbs_kernel(const Vec3& p, const Vec3& q, const GibbsKernelParams& params);

// Searcher tracks every `sample_spacing` m at `sensor_height_ground`, then UAV
// curves every `sample_spacing` m of arc length at their own altitude. All
// readings are 0: the person has not been found.
std::vector<Observation> assemble_observations(std::span<const SearcherPath> searchers,
                                               const TrajectorySet& trajectories,
                                               double sample_spacing, double sensor_height_ground);

// Observations along an arbitrary 3D polyline (altitude in z).
std::vector<Observation> polyline_observations(std::span<const Vec3> polyline, double sample_spacing);

// Prior mean: the heatmap rescaled so its peak cell is 1, interpolated
// bilinearly between cell centers.
class PriorMean {
public:
    explicit PriorMean(const BeliefGrid& prior);
    double operator()(const Vec2& p) const;
    double scale() const { return kappa_; }
    const BeliefGrid& grid() const { return *prior_; }

private:
    const BeliefGrid* prior_;
    double kappa_;
};

// Dense GP regression at every prior cell center (query altitude 0). With
// `sparsify` set this forwards to sparse_posterior.
GPPosterior posterior(std::span<const Observation> observations, const BeliefGrid& prior,
                      const GibbsKernelParams& params,
                      const std::optional<MortonConfig>& sparsify = std::nullopt);

// 63-bit Morton code, 21 bits per axis quantised within `bounds`.
std::uint64_t morton_code(const Vec3& p, const Box3& bounds);
// Stable sort permutation by Morton code. Throws InvalidArgument for points
// outside bounds.
std::vector<std::size_t> morton_sort(std::span<const Vec3> points, const Box3& bounds);

// Morton-ordered, tile-sparse approximation: covariance tiles whose centroids
// are farther apart than config.cutoff are dropped before factorisation.
GPPosterior sparse_posterior(std::span<const Observation> observations, const BeliefGrid& prior,
                             const GibbsKernelParams& params, const MortonConfig& config);

// Posterior conditioned once on a fixed observation set (the searchers) that
// can then absorb a changing extra set (the UAVs) through a Schur-complement
// update. Equivalent to a dense posterior over the union.
class ConditionedPosterior {
public:
    ConditionedPosterior(std::vector<Observation> base, const BeliefGrid& prior,
                         const GibbsKernelParams& params);

    GPPosterior with_extra(std::span<const Observation> extra) const;
    const GPPosterior& base_posterior() const { return base_post_; }
    std::size_t base_size() const { return base_.size(); }

private:
    std::vector<Observation> base_;
    const BeliefGrid* prior_;
    GibbsKernelParams params_;
    PriorMean m0_;
    std::vector<double> xs_, ys_, zs_, ls_;
    std::optional<linalg::Cholesky> chol_;
    std::vector<double> alpha_;    // L^-1 (y - m0) over the base set
    std::vector<double> v_;        // row c: L^-1 k(base, cell c)
    GPPosterior base_post_;        // unclamped variance
};

} // namespace sarplan
