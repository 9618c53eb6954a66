#pragma once

// Data-parallel inner loops shared by the GP and the linear algebra.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is picked once at startup from CPUID; the
// SARPLAN_SIMD environment variable ("scalar" or "avx2") overrides it.
// Variants agree to rounding (summation order and FMA contraction differ).

#include <cstddef>
#include <span>
#include <string_view>

namespace sarplan::simd {

enum class Isa { Scalar, Avx2 };

// Structure-of-arrays view over kernel input points. `ls` holds each
// point's horizontal lengthscale.
struct PointColumns {
    std::span<const double> xs;
    std::span<const double> ys;
    std::span<const double> zs;
    std::span<const double> ls;

    std::size_t size() const { return xs.size(); }
};

// One fixed point of a Gibbs-kernel row evaluation plus the shared constants.
struct GibbsRowQuery {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double l = 1.0;
    double signal_var = 1.0;       // sigma_f^2
    double inv_two_lvert_sq = 0.5; // 1 / (2 l_vert^2)
};

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*gibbs_row)(const GibbsRowQuery& q, const double* xs, const double* ys,
                      const double* zs, const double* ls, double* out, std::size_t n);
    void (*vexp)(const double* in, double* out, std::size_t n);
};

bool available(Isa isa);
const KernelTable& table(Isa isa);

// The table every free function below dispatches through.
const KernelTable& active();
Isa active_isa();

// Switches the active table. Returns false (and changes nothing) if the ISA
// is not supported by this CPU or build.
bool select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline void gibbs_row(const GibbsRowQuery& q, const PointColumns& pts, std::span<double> out) {
    active().gibbs_row(q, pts.xs.data(), pts.ys.data(), pts.zs.data(), pts.ls.data(), out.data(),
                       pts.size());
}

inline void vexp(std::span<const double> in, std::span<double> out) {
    active().vexp(in.data(), out.data(), in.size());
}

} // namespace sarplan::simd
