#include "sarplan/linalg.hpp"

#include "sarplan/errors.hpp"
#include "sarplan/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sarplan::linalg {

template <class F>
void Cholesky::for_each_segment(std::size_t i, std::size_t j_end, F&& f) const {
    if (block_ == 0) {
        f(std::size_t{0}, j_end);
        return;
    }
    for (std::size_t tile : row_tiles_[i / block_]) {
        const std::size_t begin = tile * block_;
        if (begin >= j_end) break;
        f(begin, std::min(begin + block_, j_end));
    }
}

bool Cholesky::try_factor(const SquareMatrix& a, double jitter) {
    const std::size_t n = a.n;
    l_ = SquareMatrix(n);
    const auto& k = simd::active();
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = l_.data.data() + i * n;
        const std::size_t ti = block_ ? i / block_ : 0;
        for (std::size_t j = 0; j <= i; ++j) {
            if (block_ && !pattern_[ti * nb_ + j / block_]) {
                j = (j / block_ + 1) * block_ - 1; // skip the rest of a zero tile
                continue;
            }
            const double* lj = l_.data.data() + j * n;
            double s = a(i, j);
            if (i == j) s += jitter;
            // Both rows share the tile pattern left of j only where both tiles
            // are nonzero; row i's pattern already contains row j's fill.
            for_each_segment(j, j, [&](std::size_t b, std::size_t e) {
                s -= k.dot(li + b, lj + b, e - b);
            });
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                l_(i, i) = std::sqrt(s);
            } else {
                l_(i, j) = s / l_(j, j);
            }
        }
    }
    jitter_ = jitter;
    return true;
}

Cholesky Cholesky::factor(const SquareMatrix& a) {
    Cholesky c;
    std::vector<double> tried;
    for (double jitter : kJitterLadder) {
        tried.push_back(jitter);
        if (c.try_factor(a, jitter)) return c;
    }
    throw NumericalFailure("covariance is not positive definite after jitter escalation",
                           std::move(tried));
}

Cholesky Cholesky::factor_tiled(const SquareMatrix& a, std::size_t block,
                                const std::vector<char>& keep) {
    if (block == 0) throw InvalidArgument("tile block size must be >= 1");
    const std::size_t n = a.n;
    const std::size_t nb = n / block + (n % block != 0);
    if (keep.size() != nb * nb) throw InvalidArgument("tile mask has wrong size");

    Cholesky c;
    c.block_ = block;
    c.nb_ = nb;
    c.pattern_.assign(nb * nb, 0);
    // Symbolic fill: L_IJ is nonzero if A_IJ is kept or some earlier column K
    // has both L_IK and L_JK nonzero.
    for (std::size_t J = 0; J < nb; ++J) {
        c.pattern_[J * nb + J] = 1;
        for (std::size_t I = J + 1; I < nb; ++I) {
            char nz = keep[I * nb + J];
            for (std::size_t K = 0; K < J && !nz; ++K)
                nz = c.pattern_[I * nb + K] && c.pattern_[J * nb + K];
            c.pattern_[I * nb + J] = nz;
        }
    }
    c.row_tiles_.assign(nb, {});
    for (std::size_t I = 0; I < nb; ++I)
        for (std::size_t J = 0; J <= I; ++J)
            if (c.pattern_[I * nb + J]) c.row_tiles_[I].push_back(J);

    // Zero the dropped tiles of the input so the factor sees exactly the
    // block-sparse matrix.
    SquareMatrix masked = a;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (i / block != j / block && !keep[(i / block) * nb + j / block]) masked(i, j) = 0.0;

    std::vector<double> tried;
    for (double jitter : kJitterLadder) {
        tried.push_back(jitter);
        if (c.try_factor(masked, jitter)) return c;
    }
    throw NumericalFailure("block-sparse covariance is not positive definite after jitter escalation",
                           std::move(tried));
}

double Cholesky::tile_density() const {
    if (block_ == 0) return 1.0;
    const std::size_t nb = row_tiles_.size();
    std::size_t nz = 0;
    for (const auto& r : row_tiles_) nz += r.size();
    return static_cast<double>(nz) / static_cast<double>(nb * (nb + 1) / 2);
}

void Cholesky::forward_solve(std::span<double> b) const {
    const std::size_t n = l_.n;
    const auto& k = simd::active();
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = l_.data.data() + i * n;
        double s = b[i];
        for_each_segment(i, i, [&](std::size_t lo, std::size_t hi) {
            s -= k.dot(li + lo, b.data() + lo, hi - lo);
        });
        b[i] = s / li[i];
    }
}

void Cholesky::backward_solve(std::span<double> b) const {
    const std::size_t n = l_.n;
    const auto& k = simd::active();
    for (std::size_t i = n; i-- > 0;) {
        const double* li = l_.data.data() + i * n;
        b[i] /= li[i];
        const double xi = b[i];
        for_each_segment(i, i, [&](std::size_t lo, std::size_t hi) {
            k.axpy(-xi, li + lo, b.data() + lo, hi - lo);
        });
    }
}

} // namespace sarplan::linalg
