// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include "nlhelm/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

namespace nlhelm::kernels {

#if defined(__AVX2__) && defined(__FMA__)
namespace {

// Lane notation: <re0 im0 re1 im1> is two interleaved complex values.

inline double hsum_pairs_re(__m256d acc, double* im) {
  // acc = <re_a im_a re_b im_b>; fold the two complex halves.
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  *im = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

void real_matvec_avx2(const double* mat, std::size_t rows, std::size_t cols, const cdouble* x,
                      cdouble* y) {
  const double* xv = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = mat + i * cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      // <m0 m0 m1 m1>, <m2 m2 m3 m3>
      const __m128d m01 = _mm_loadu_pd(row + j);
      const __m128d m23 = _mm_loadu_pd(row + j + 2);
      const __m256d w01 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(m01), 0b01010000);
      const __m256d w23 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(m23), 0b01010000);
      acc0 = _mm256_fmadd_pd(w01, _mm256_loadu_pd(xv + 2 * j), acc0);
      acc1 = _mm256_fmadd_pd(w23, _mm256_loadu_pd(xv + 2 * j + 4), acc1);
    }
    double im = 0.0;
    double re = hsum_pairs_re(_mm256_add_pd(acc0, acc1), &im);
    for (; j < cols; ++j) {
      re += row[j] * x[j].real();
      im += row[j] * x[j].imag();
    }
    y[i] = {re, im};
  }
}

void abs2_avx2(const cdouble* z, double* out, std::size_t n) {
  const double* zv = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(zv + 2 * i);      // <r0 i0 r1 i1>
    const __m256d b = _mm256_loadu_pd(zv + 2 * i + 4);  // <r2 i2 r3 i3>
    const __m256d a2 = _mm256_mul_pd(a, a);
    const __m256d b2 = _mm256_mul_pd(b, b);
    // hadd -> <|z0|^2 |z2|^2 |z1|^2 |z3|^2>
    const __m256d h = _mm256_hadd_pd(a2, b2);
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < n; ++i) out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void scale_avx2(const double* s, cdouble* z, std::size_t n) {
  double* zv = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d w = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(s + i)), 0b01010000);
    _mm256_storeu_pd(zv + 2 * i, _mm256_mul_pd(w, _mm256_loadu_pd(zv + 2 * i)));
  }
  for (; i < n; ++i) z[i] *= s[i];
}

void clenshaw_avx2(const double* coeffs, std::size_t ncoeffs, const double* x, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d two_x = _mm256_add_pd(xv, xv);
    __m256d b1 = _mm256_setzero_pd();
    __m256d b2 = _mm256_setzero_pd();
    for (std::size_t k = ncoeffs; k-- > 1;) {
      const __m256d b0 = _mm256_sub_pd(_mm256_fmadd_pd(two_x, b1, _mm256_set1_pd(coeffs[k])), b2);
      b2 = b1;
      b1 = b0;
    }
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_fmadd_pd(xv, b1, _mm256_set1_pd(coeffs[0])), b2));
  }
  if (i < n) scalar_table().clenshaw(coeffs, ncoeffs, x + i, out + i, n - i);
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table{real_matvec_avx2, abs2_avx2, scale_avx2, clenshaw_avx2};
  return &table;
}

#else

const KernelTable* avx2_table_impl() { return nullptr; }

#endif

}  // namespace nlhelm::kernels
