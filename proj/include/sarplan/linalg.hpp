#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sarplan::linalg {

// Row-major dense square matrix.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    std::span<double> row(std::size_t i) { return {data.data() + i * n, n}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * n, n}; }
};

// Diagonal jitter ladder tried in order; the first entry is "no jitter".
inline constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

// Lower-triangular Cholesky factor. When constructed with a tile pattern,
// tiles outside the (filled) pattern are known zero and skipped in every
// inner product.
class Cholesky {
public:
    // Dense factorization of a symmetric matrix (lower triangle is read).
    // Walks kJitterLadder and throws NumericalFailure if every level fails.
    static Cholesky factor(const SquareMatrix& a);

    // Block-sparse factorization. `keep` is an nb x nb row-major mask over
    // block x block tiles (only the lower triangle is consulted, diagonal
    // tiles are always kept). Entries of `a` inside dropped tiles are treated
    // as zero.
    static Cholesky factor_tiled(const SquareMatrix& a, std::size_t block,
                                 const std::vector<char>& keep);

    std::size_t size() const { return l_.n; }
    double jitter() const { return jitter_; }
    const SquareMatrix& lower() const { return l_; }

    // Fraction of lower-triangle tiles that are structurally nonzero after fill.
    double tile_density() const;

    // Solves L x = b in place.
    void forward_solve(std::span<double> b) const;
    // Solves L^T x = b in place.
    void backward_solve(std::span<double> b) const;

private:
    bool try_factor(const SquareMatrix& a, double jitter);
    // [k_begin, k_end) column ranges of nonzero tiles in row i, strictly left
    // of the diagonal tile plus the diagonal tile's own prefix.
    template <class F> void for_each_segment(std::size_t i, std::size_t j_end, F&& f) const;

    SquareMatrix l_;
    double jitter_ = 0.0;
    std::size_t block_ = 0;            // 0 means dense
    std::size_t nb_ = 0;
    std::vector<char> pattern_;        // nb x nb, lower triangle
    std::vector<std::vector<std::size_t>> row_tiles_; // nonzero tile columns per tile row
};

} // namespace sarplan::linalg
