#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace sarplan::simd {
namespace {

bool cpu_has_avx2() {
#if defined(SARPLAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() {
    Isa isa = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
    if (const char* env = std::getenv("SARPLAN_SIMD")) {
        const std::string_view v(env);
        if (v == "scalar") isa = Isa::Scalar;
        else if (v == "avx2" && cpu_has_avx2()) isa = Isa::Avx2;
    }
    return isa;
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table_ptr{&table(initial_isa())};
    return table_ptr;
}

} // namespace

bool available(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& table(Isa isa) {
#if defined(SARPLAN_HAVE_AVX2)
    if (isa == Isa::Avx2 && cpu_has_avx2()) return detail::kAvx2Table;
#endif
    (void)isa;
    return detail::kScalarTable;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return &active() == &detail::kScalarTable ? Isa::Scalar : Isa::Avx2; }

bool select(Isa isa) {
    if (!available(isa)) return false;
    current().store(&table(isa), std::memory_order_release);
    return true;
}

} // namespace sarplan::simd
