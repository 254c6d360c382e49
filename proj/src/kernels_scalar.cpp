#include "nlhelm/kernels.hpp"

namespace nlhelm::kernels {
namespace {

void real_matvec_scalar(const double* mat, std::size_t rows, std::size_t cols, const cdouble* x,
                        cdouble* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = mat + i * cols;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      re += row[j] * x[j].real();
      im += row[j] * x[j].imag();
    }
    y[i] = {re, im};
  }
}

void abs2_scalar(const cdouble* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void scale_scalar(const double* s, cdouble* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] *= s[i];
}

void clenshaw_scalar(const double* coeffs, std::size_t ncoeffs, const double* x, double* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double two_x = 2.0 * x[i];
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = ncoeffs; k-- > 1;) {
      const double b0 = coeffs[k] + two_x * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    out[i] = coeffs[0] + x[i] * b1 - b2;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{real_matvec_scalar, abs2_scalar, scale_scalar, clenshaw_scalar};
  return table;
}

}  // namespace nlhelm::kernels
