#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nlhelm/legendre.hpp"

namespace nlhelm {

/// Cauchy data on r = R0 in Legendre coefficients: U = sum h_l P_l, dU/dr = sum g_l P_l.
struct BoundaryData {
  std::vector<cdouble> h;
  std::vector<cdouble> g;
  double R0 = 1.0;

  std::size_t degree() const { return h.size() - 1; }
};

/// j_0(x) .. j_lmax(x) by Miller's downward recurrence. Throws DomainError for x <= 0.
std::vector<double> spherical_bessel_j(std::size_t lmax, double x);

/// J_0(z) .. J_kmax(z). Power series for |z| <= 4, normalized downward recurrence beyond.
std::vector<double> bessel_J(std::size_t kmax, double z);

/// i^l, exact.
cdouble i_pow(std::size_t l);

/// Plane wave e^{i k r t} on the inner sphere:
///   h_l = (2l+1) i^l j_l(k R0),
///   g_l = (2l+1) i^l k (j_{l-1}(k R0) - (l+1)/(k R0) j_l(k R0)),  j_{-1}(x) = cos(x)/x.
BoundaryData plane_wave_coeffs(double k, double R0, std::size_t n);

/// Boundary data for U(R0, t) = A(t) e^{i k R0 t}, dU/dr = A(t) i k t e^{i k R0 t},
/// A given by real Legendre coefficients, projected with a Gauss-Legendre rule.
BoundaryData modulated_plane_wave(double k, double R0, std::size_t n,
                                  const std::vector<double>& envelope);

}  // namespace nlhelm
