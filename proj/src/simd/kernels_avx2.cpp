// Compiled with -mavx2 -mfma; only reached through the dispatch table after
// a CPUID check.

#include "kernels_impl.hpp"

#include <cmath>
#include <immintrin.h>

namespace sarplan::simd::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Cephes-style exp: n = round(x log2 e), r = x - n ln 2 in two pieces, a
// (3,3) Pade approximant on r, then scale by 2^n through the exponent bits.
// Inputs below -708 flush to zero.
inline __m256d exp256(__m256d x) {
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                       _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125e-1), x);
    r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212e-6), r);

    const __m256d xx = _mm256_mul_pd(r, r);
    __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878e-4), xx,
                                 _mm256_set1_pd(3.02994407707441961300e-2));
    px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910e-1));
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042e-6), xx,
                                 _mm256_set1_pd(2.52448340349684104192e-3));
    qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766e-1));
    qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009e0));

    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    __m256i n = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(fx));
    n = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
    const __m256d result = _mm256_mul_pd(e, _mm256_castsi256_pd(n));
    return _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gibbs_row_avx2(const GibbsRowQuery& q, const double* xs, const double* ys, const double* zs,
                    const double* ls, double* out, std::size_t n) {
    const __m256d qx = _mm256_set1_pd(q.x);
    const __m256d qy = _mm256_set1_pd(q.y);
    const __m256d qz = _mm256_set1_pd(q.z);
    const __m256d ql2 = _mm256_set1_pd(q.l * q.l);
    const __m256d two_ql = _mm256_set1_pd(2.0 * q.l);
    const __m256d s2 = _mm256_set1_pd(q.signal_var);
    const __m256d neg_vert = _mm256_set1_pd(-q.inv_two_lvert_sq);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), qy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), qz);
        const __m256d li = _mm256_loadu_pd(ls + i);
        const __m256d sum_l2 = _mm256_fmadd_pd(li, li, ql2);
        const __m256d r2 = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
        const __m256d pref = _mm256_div_pd(_mm256_mul_pd(two_ql, li), sum_l2);
        const __m256d expo =
            _mm256_fmadd_pd(_mm256_mul_pd(dz, dz), neg_vert,
                            _mm256_sub_pd(_mm256_setzero_pd(), _mm256_div_pd(r2, sum_l2)));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(s2, pref), exp256(expo)));
    }
    const double lq2 = q.l * q.l;
    for (; i < n; ++i) {
        const double dx = xs[i] - q.x;
        const double dy = ys[i] - q.y;
        const double dz = zs[i] - q.z;
        const double sum_l2 = lq2 + ls[i] * ls[i];
        const double pref = 2.0 * q.l * ls[i] / sum_l2;
        out[i] = q.signal_var * pref *
                 std::exp(-(dx * dx + dy * dy) / sum_l2 - dz * dz * q.inv_two_lvert_sq);
    }
}

void vexp_avx2(const double* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp256(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i) out[i] = std::exp(in[i]);
}

} // namespace

const KernelTable kAvx2Table{"avx2", dot_avx2, axpy_avx2, gibbs_row_avx2, vexp_avx2};

} // namespace sarplan::simd::detail
