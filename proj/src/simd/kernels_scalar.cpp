#include "kernels_impl.hpp"

#include <cmath>

namespace sarplan::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gibbs_row_scalar(const GibbsRowQuery& q, const double* xs, const double* ys,
                      const double* zs, const double* ls, double* out, std::size_t n) {
    const double lq2 = q.l * q.l;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - q.x;
        const double dy = ys[i] - q.y;
        const double dz = zs[i] - q.z;
        const double sum_l2 = lq2 + ls[i] * ls[i];
        // Two horizontal axes share the lengthscale, so the sqrt prefactors
        // multiply out to a single ratio.
        const double pref = 2.0 * q.l * ls[i] / sum_l2;
        const double expo = -(dx * dx + dy * dy) / sum_l2 - dz * dz * q.inv_two_lvert_sq;
        out[i] = q.signal_var * pref * std::exp(expo);
    }
}

void vexp_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(in[i]);
}

} // namespace

const KernelTable kScalarTable{"scalar", dot_scalar, axpy_scalar, gibbs_row_scalar, vexp_scalar};

} // namespace sarplan::simd::detail
