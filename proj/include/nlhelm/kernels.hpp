#pragma once

// Data-parallel inner loops used by the pseudospectral right-hand side and the
// field synthesis. Every kernel has a scalar reference implementation; an
// AVX2/FMA variant is compiled in a separate translation unit and selected at
// runtime when the CPU supports it. Setting NLHELM_SIMD=scalar in the
// environment forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace nlhelm::kernels {

using cdouble = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  /// y[i] = sum_j mat[i*cols + j] * x[j]; mat real, x and y complex.
  void (*real_matvec)(const double* mat, std::size_t rows, std::size_t cols, const cdouble* x,
                      cdouble* y);
  /// out[i] = |z[i]|^2
  void (*abs2)(const cdouble* z, double* out, std::size_t n);
  /// z[i] *= s[i]
  void (*scale)(const double* s, cdouble* z, std::size_t n);
  /// out[i] = sum_k coeffs[k] T_k(x[i]) by Clenshaw's recurrence.
  void (*clenshaw)(const double* coeffs, std::size_t ncoeffs, const double* x, double* out,
                   std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

Isa active_isa();
const KernelTable& active();
std::string_view isa_name(Isa isa);

inline void real_matvec(std::span<const double> mat, std::size_t cols, std::span<const cdouble> x,
                        std::span<cdouble> y) {
  active().real_matvec(mat.data(), y.size(), cols, x.data(), y.data());
}
inline void abs2(std::span<const cdouble> z, std::span<double> out) {
  active().abs2(z.data(), out.data(), z.size());
}
inline void scale(std::span<const double> s, std::span<cdouble> z) {
  active().scale(s.data(), z.data(), z.size());
}
inline void clenshaw(std::span<const double> coeffs, std::span<const double> x,
                     std::span<double> out) {
  active().clenshaw(coeffs.data(), coeffs.size(), x.data(), out.data(), x.size());
}

}  // namespace nlhelm::kernels
