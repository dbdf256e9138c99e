#pragma once

// Data-parallel inner loops shared by the distance, eigen and clustering
// code. Each instruction set provides one KernelTable; the scalar table is
// the reference every vector variant is tested against.

#include <cstddef>
#include <span>
#include <string_view>

namespace clab::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sq_l2)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// y -= a * x1 + b * x2
    void (*sub_rank2)(double a, const double* x1, double b, const double* x2, double* y,
                      std::size_t n);
};

/// True when the variant was compiled in and the running CPU supports it.
bool available(Isa isa) noexcept;

/// Throws std::invalid_argument for an unavailable variant.
const KernelTable& table(Isa isa);

/// The table selected once per process: the widest available variant, or the
/// one named by CLUSTERLAB_ISA (scalar|avx2|neon) when set and available.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

inline double sq_l2(std::span<const double> a, std::span<const double> b) noexcept {
    return active().sq_l2(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(alpha, x.data(), y.data(), y.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(CLUSTERLAB_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(CLUSTERLAB_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace clab::simd
