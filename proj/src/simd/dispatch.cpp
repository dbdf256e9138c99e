#include "clusterlab/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace clab::simd {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

bool available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(CLUSTERLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(CLUSTERLAB_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!available(isa))
        throw std::invalid_argument("kernel variant not available: " + std::string(to_string(isa)));
    switch (isa) {
#if defined(CLUSTERLAB_HAVE_AVX2)
        case Isa::avx2: return detail::avx2_table;
#endif
#if defined(CLUSTERLAB_HAVE_NEON)
        case Isa::neon: return detail::neon_table;
#endif
        default: return detail::scalar_table;
    }
}

namespace {

const KernelTable& select() noexcept {
    if (const char* forced = std::getenv("CLUSTERLAB_ISA")) {
        const std::string_view name(forced);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
            if (name == to_string(isa) && available(isa)) return table(isa);
    }
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (available(isa)) return table(isa);
    return detail::scalar_table;
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& chosen = select();
    return chosen;
}

}  // namespace clab::simd
