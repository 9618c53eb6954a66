#include "sarplan/sensing_gp.hpp"

#include "sarplan/errors.hpp"
#include "sarplan/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sarplan {
namespace {

struct Columns {
    std::vector<double> xs, ys, zs, ls, noise;

    Columns(std::span<const Observation> obs, const GibbsKernelParams& p) {
        for (const auto& o : obs) {
            xs.push_back(o.p.x);
            ys.push_back(o.p.y);
            zs.push_back(o.p.z);
            ls.push_back(p.horizontal_lengthscale(o.p.z));
            noise.push_back(p.noise_variance(o.p.z));
        }
    }
    simd::PointColumns view() const { return {xs, ys, zs, ls}; }
    std::size_t size() const { return xs.size(); }
};

simd::GibbsRowQuery row_query(const Vec3& p, const GibbsKernelParams& params) {
    return {p.x, p.y, p.z, params.horizontal_lengthscale(p.z), params.sigma_f * params.sigma_f,
            1.0 / (2.0 * params.l_vert * params.l_vert)};
}

linalg::SquareMatrix covariance(const Columns& cols, const GibbsKernelParams& params) {
    const std::size_t n = cols.size();
    linalg::SquareMatrix k(n);
    for (std::size_t i = 0; i < n; ++i) {
        simd::gibbs_row(row_query({cols.xs[i], cols.ys[i], cols.zs[i]}, params), cols.view(), k.row(i));
        k(i, i) += cols.noise[i];
    }
    return k;
}

std::vector<Vec2> cell_centers(const GridLattice& g) {
    std::vector<Vec2> cells(g.cell_count());
    for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = g.cell_center(c);
    return cells;
}

// Shared tail of every posterior route: given a factor of the observation
// covariance (rows ordered like `cols`), predict at each cell center.
GPPosterior predict(const linalg::Cholesky& chol, const Columns& cols,
                    std::span<const Observation> obs, const PriorMean& m0,
                    const GibbsKernelParams& params) {
    const GridLattice& lattice = m0.grid().lattice;
    GPPosterior post;
    post.cells = cell_centers(lattice);
    post.mean.resize(post.cells.size());
    post.var.resize(post.cells.size());

    std::vector<double> alpha(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) alpha[i] = obs[i].value - m0(obs[i].p.xy());
    chol.forward_solve(alpha);

    const double s2 = params.sigma_f * params.sigma_f;
    std::vector<double> kc(obs.size());
    for (std::size_t c = 0; c < post.cells.size(); ++c) {
        const Vec2 cell = post.cells[c];
        const double prior_mean = m0.grid().probs[c] * m0.scale();
        if (obs.empty()) {
            post.mean[c] = prior_mean;
            post.var[c] = s2;
            continue;
        }
        simd::gibbs_row(row_query({cell.x, cell.y, 0.0}, params), cols.view(), kc);
        chol.forward_solve(kc);
        post.mean[c] = prior_mean + simd::dot(kc, alpha);
        post.var[c] = std::max(0.0, s2 - simd::dot(kc, kc));
    }
    return post;
}

} // namespace

void GibbsKernelParams::validate() const {
    if (!(sigma_f > 0.0) || !(l0 > 0.0) || !(gamma >= 0.0) || !(l_vert > 0.0) || !(noise0 > 0.0) ||
        !(noise_alt >= 0.0))
        throw InvalidArgument("invalid Gibbs kernel parameters");
}

double gibbs_kernel(const Vec3& p, const Vec3& q, const GibbsKernelParams& params) {
    const double lp = params.horizontal_lengthscale(p.z);
    const double lq = params.horizontal_lengthscale(q.z);
    const double lz = params.l_vert;
    const double sum_h = lp * lp + lq * lq;
    const double sum_z = 2.0 * lz * lz;
    // Product over x, y, z of sqrt(2 l(p) l(q) / (l(p)^2 + l(q)^2)); the z
    // factor is exactly 1 because l_z is constant.
    const double pref_h = std::sqrt(2.0 * lp * lq / sum_h);
    const double pref_z = std::sqrt(2.0 * lz * lz / sum_z);
    const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
    return params.sigma_f * params.sigma_f * pref_h * pref_h * pref_z *
           std::exp(-(dx * dx) / sum_h - (dy * dy) / sum_h - (dz * dz) / sum_z);
}

std::vector<Observation> polyline_observations(std::span<const Vec3> polyline, double sample_spacing) {
    std::vector<Observation> out;
    for (const auto& p : resample_polyline(polyline, sample_spacing)) out.push_back({p, 0.0});
    return out;
}

std::vector<Observation> assemble_observations(std::span<const SearcherPath> searchers,
                                               const TrajectorySet& trajectories,
                                               double sample_spacing, double sensor_height_ground) {
    if (!(sample_spacing > 0.0)) throw InvalidArgument("sample spacing must be positive");
    std::vector<Observation> out;
    std::vector<Vec3> track;
    for (const auto& s : searchers) {
        track.clear();
        for (const auto& sample : s.samples) track.push_back({sample.p.x, sample.p.y, sensor_height_ground});
        for (const auto& p : resample_polyline(track, sample_spacing)) out.push_back({p, 0.0});
    }
    for (const auto& uav : trajectories.uavs)
        for (const auto& p : sample_by_arc_length(uav, sample_spacing)) out.push_back({p, 0.0});
    return out;
}

PriorMean::PriorMean(const BeliefGrid& prior) : prior_(&prior) {
    const double peak = prior.max_prob();
    kappa_ = peak > 0.0 ? 1.0 / peak : 0.0;
}

double PriorMean::operator()(const Vec2& p) const {
    return kappa_ * bilinear(prior_->lattice, prior_->probs, p);
}

GPPosterior posterior(std::span<const Observation> observations, const BeliefGrid& prior,
                      const GibbsKernelParams& params, const std::optional<MortonConfig>& sparsify) {
    if (sparsify) return sparse_posterior(observations, prior, params, *sparsify);
    params.validate();
    const PriorMean m0(prior);
    const Columns cols(observations, params);
    const auto chol = linalg::Cholesky::factor(covariance(cols, params));
    return predict(chol, cols, observations, m0, params);
}

std::uint64_t morton_code(const Vec3& p, const Box3& bounds) {
    constexpr std::uint64_t kMax = (1u << 21) - 1;
    auto quantize = [&](double v, double lo, double hi) -> std::uint64_t {
        if (!(hi > lo)) return 0;
        const double u = (v - lo) / (hi - lo) * static_cast<double>(1u << 21);
        if (!(u > 0.0)) return 0;
        return std::min<std::uint64_t>(static_cast<std::uint64_t>(u), kMax);
    };
    // Spread the low 21 bits of v so there are two zero bits between each.
    auto spread = [](std::uint64_t v) {
        v &= 0x1fffff;
        v = (v | v << 32) & 0x1f00000000ffffull;
        v = (v | v << 16) & 0x1f0000ff0000ffull;
        v = (v | v << 8) & 0x100f00f00f00f00full;
        v = (v | v << 4) & 0x10c30c30c30c30c3ull;
        v = (v | v << 2) & 0x1249249249249249ull;
        return v;
    };
    return spread(quantize(p.x, bounds.lo.x, bounds.hi.x)) |
           spread(quantize(p.y, bounds.lo.y, bounds.hi.y)) << 1 |
           spread(quantize(p.z, bounds.lo.z, bounds.hi.z)) << 2;
}

std::vector<std::size_t> morton_sort(std::span<const Vec3> points, const Box3& bounds) {
    std::vector<std::uint64_t> codes(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!bounds.contains(points[i])) throw InvalidArgument("point outside Morton bounds");
        codes[i] = morton_code(points[i], bounds);
    }
    std::vector<std::size_t> perm(points.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return codes[a] < codes[b]; });
    return perm;
}

GPPosterior sparse_posterior(std::span<const Observation> observations, const BeliefGrid& prior,
                             const GibbsKernelParams& params, const MortonConfig& config) {
    params.validate();
    if (config.block < 1) throw InvalidArgument("Morton block must be >= 1");
    if (!(config.cutoff > 0.0)) throw InvalidArgument("Morton cutoff must be positive");
    const PriorMean m0(prior);
    if (observations.empty()) {
        const Columns none(observations, params);
        return predict(linalg::Cholesky::factor(linalg::SquareMatrix(0)), none, observations, m0,
                       params);
    }

    std::vector<Vec3> pts;
    Box3 box{observations.front().p, observations.front().p};
    for (const auto& o : observations) {
        pts.push_back(o.p);
        box.lo = {std::min(box.lo.x, o.p.x), std::min(box.lo.y, o.p.y), std::min(box.lo.z, o.p.z)};
        box.hi = {std::max(box.hi.x, o.p.x), std::max(box.hi.y, o.p.y), std::max(box.hi.z, o.p.z)};
    }
    // Quantise every axis on the same scale so a thin altitude range does not
    // dominate the interleaving.
    const double side = std::max({box.hi.x - box.lo.x, box.hi.y - box.lo.y, box.hi.z - box.lo.z});
    box.hi = box.lo + Vec3{side, side, side};
    const auto perm = morton_sort(pts, box);
    std::vector<Observation> sorted;
    sorted.reserve(observations.size());
    for (std::size_t i : perm) sorted.push_back(observations[i]);

    const std::size_t n = sorted.size();
    const std::size_t nb = n / config.block + (n % config.block != 0);
    std::vector<Vec3> centroids(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * config.block, hi = std::min(n, lo + config.block);
        Vec3 c;
        for (std::size_t i = lo; i < hi; ++i) c += sorted[i].p;
        centroids[b] = c * (1.0 / static_cast<double>(hi - lo));
    }
    std::vector<char> keep(nb * nb, 0);
    for (std::size_t I = 0; I < nb; ++I)
        for (std::size_t J = 0; J < nb; ++J)
            keep[I * nb + J] = I == J || distance(centroids[I], centroids[J]) <= config.cutoff;

    const Columns cols(sorted, params);
    const auto chol = linalg::Cholesky::factor_tiled(covariance(cols, params), config.block, keep);
    return predict(chol, cols, sorted, m0, params);
}

ConditionedPosterior::ConditionedPosterior(std::vector<Observation> base, const BeliefGrid& prior,
                                           const GibbsKernelParams& params)
    : base_(std::move(base)), prior_(&prior), params_(params), m0_(prior) {
    params_.validate();
    const Columns cols(base_, params_);
    xs_ = cols.xs;
    ys_ = cols.ys;
    zs_ = cols.zs;
    ls_ = cols.ls;
    chol_ = linalg::Cholesky::factor(covariance(cols, params_));

    const std::size_t n = base_.size();
    alpha_.resize(n);
    for (std::size_t i = 0; i < n; ++i) alpha_[i] = base_[i].value - m0_(base_[i].p.xy());
    chol_->forward_solve(alpha_);

    const GridLattice& lattice = prior.lattice;
    const std::size_t nc = lattice.cell_count();
    const double s2 = params_.sigma_f * params_.sigma_f;
    base_post_.cells = cell_centers(lattice);
    base_post_.mean.resize(nc);
    base_post_.var.resize(nc);
    v_.assign(nc * n, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const Vec2 cell = base_post_.cells[c];
        std::span<double> row(v_.data() + c * n, n);
        simd::gibbs_row(row_query({cell.x, cell.y, 0.0}, params_), cols.view(), row);
        chol_->forward_solve(row);
        base_post_.mean[c] = prior.probs[c] * m0_.scale() + simd::dot(row, alpha_);
        base_post_.var[c] = s2 - simd::dot(row, row);
    }
}

GPPosterior ConditionedPosterior::with_extra(std::span<const Observation> extra) const {
    GPPosterior post;
    post.cells = base_post_.cells;
    post.mean = base_post_.mean;
    post.var = base_post_.var;
    const std::size_t ns = base_.size();
    const std::size_t nu = extra.size();
    if (nu == 0) {
        for (auto& v : post.var) v = std::max(0.0, v);
        return post;
    }

    const Columns ucols(extra, params_);
    const simd::PointColumns base_view{xs_, ys_, zs_, ls_};

    // W: row u = L_S^-1 k(base, u)
    std::vector<double> w(nu * ns);
    for (std::size_t u = 0; u < nu; ++u) {
        std::span<double> row(w.data() + u * ns, ns);
        simd::gibbs_row(row_query(extra[u].p, params_), base_view, row);
        chol_->forward_solve(row);
    }
    // Schur complement A = K_UU + N_U - W W^T
    linalg::SquareMatrix a = covariance(ucols, params_);
    for (std::size_t i = 0; i < nu; ++i) {
        const double* wi = w.data() + i * ns;
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = a(i, j) - simd::dot({wi, ns}, {w.data() + j * ns, ns});
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    const auto schur = linalg::Cholesky::factor(a);

    std::vector<double> b(nu);
    for (std::size_t u = 0; u < nu; ++u)
        b[u] = extra[u].value - m0_(extra[u].p.xy()) - simd::dot({w.data() + u * ns, ns}, alpha_);
    schur.forward_solve(b);

    std::vector<double> z(nu);
    for (std::size_t c = 0; c < post.cells.size(); ++c) {
        const Vec2 cell = post.cells[c];
        simd::gibbs_row(row_query({cell.x, cell.y, 0.0}, params_), ucols.view(), z);
        const std::span<const double> vc(v_.data() + c * ns, ns);
        for (std::size_t u = 0; u < nu; ++u) z[u] -= simd::dot({w.data() + u * ns, ns}, vc);
        schur.forward_solve(z);
        post.mean[c] += simd::dot(z, b);
        post.var[c] = std::max(0.0, post.var[c] - simd::dot(z, z));
    }
    return post;
}

} // namespace sarplan
