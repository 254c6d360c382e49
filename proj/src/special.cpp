#include "nlhelm/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlhelm/errors.hpp"

namespace nlhelm {

namespace {

constexpr double kBig = 1e200;

std::size_t miller_start(std::size_t order, double x) {
  const double top = std::max(static_cast<double>(order), std::abs(x));
  return static_cast<std::size_t>(top + 30.0 + std::sqrt(40.0 * top));
}

}  // namespace

std::vector<double> spherical_bessel_j(std::size_t lmax, double x) {
  if (!(x > 0.0)) throw DomainError("spherical_bessel_j: x must be positive");
  const std::size_t start = miller_start(std::max<std::size_t>(lmax, 1), x);
  std::vector<double> j(std::max<std::size_t>(lmax, 1) + 1, 0.0);
  double next = 0.0;   // j_{l+1}
  double cur = 1e-300; // j_l, arbitrary scale
  for (std::size_t l = start; l > 0; --l) {
    if (l < j.size()) j[l] = cur;
    const double prev = (2.0 * static_cast<double>(l) + 1.0) / x * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      next /= kBig;
      for (auto& v : j) v /= kBig;
    }
  }
  j[0] = cur;
  // Normalize with whichever closed form is better conditioned at this x.
  const double j0 = std::sin(x) / x;
  const double j1 = (std::sin(x) / x - std::cos(x)) / x;
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / j[0] : j1 / j[1];
  for (auto& v : j) v *= scale;
  j.resize(lmax + 1);
  return j;
}

std::vector<double> bessel_J(std::size_t kmax, double z) {
  std::vector<double> J(kmax + 1, 0.0);
  if (z == 0.0) {
    J[0] = 1.0;
    return J;
  }
  const double az = std::abs(z);
  if (az <= 4.0) {
    const double h = 0.5 * az;
    double lead = 1.0;  // (z/2)^k / k!
    for (std::size_t k = 0; k <= kmax; ++k) {
      if (k > 0) lead *= h / static_cast<double>(k);
      double term = lead;
      double sum = term;
      for (std::size_t m = 1; m < 200; ++m) {
        term *= -h * h / (static_cast<double>(m) * static_cast<double>(m + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
      J[k] = sum;
    }
  } else {
    std::size_t start = miller_start(kmax, az);
    if (start % 2 == 1) ++start;
    double next = 0.0;
    double cur = 1e-300;
    double norm = 0.0;
    for (std::size_t k = start; k > 0; --k) {
      if (k <= kmax) J[k] = cur;
      if (k % 2 == 0) norm += 2.0 * cur;
      const double prev = 2.0 * static_cast<double>(k) / az * cur - next;
      next = cur;
      cur = prev;
      if (std::abs(cur) > kBig) {
        cur /= kBig;
        next /= kBig;
        norm /= kBig;
        for (auto& v : J) v /= kBig;
      }
    }
    J[0] = cur;
    norm += cur;
    for (auto& v : J) v /= norm;
  }
  if (z < 0.0) {
    for (std::size_t k = 1; k <= kmax; k += 2) J[k] = -J[k];
  }
  return J;
}

cdouble i_pow(std::size_t l) {
  switch (l % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

BoundaryData plane_wave_coeffs(double k, double R0, std::size_t n) {
  if (!(k > 0.0) || !(R0 > 0.0)) throw DomainError("plane_wave_coeffs: k and R0 must be positive");
  const double x = k * R0;
  const auto j = spherical_bessel_j(n, x);
  BoundaryData b;
  b.R0 = R0;
  b.h.resize(n + 1);
  b.g.resize(n + 1);
  for (std::size_t l = 0; l <= n; ++l) {
    const double ld = static_cast<double>(l);
    const cdouble c = (2.0 * ld + 1.0) * i_pow(l);
    const double jm1 = l == 0 ? std::cos(x) / x : j[l - 1];
    b.h[l] = c * j[l];
    b.g[l] = c * k * (jm1 - (ld + 1.0) / x * j[l]);
  }
  return b;
}

BoundaryData modulated_plane_wave(double k, double R0, std::size_t n,
                                  const std::vector<double>& envelope) {
  if (!(k > 0.0) || !(R0 > 0.0)) throw DomainError("modulated_plane_wave: k and R0 must be positive");
  const std::size_t q = 2 * n + 2 * envelope.size() + static_cast<std::size_t>(2.0 * k * R0) + 48;
  const QuadratureRule rule = gauss_legendre(q);
  const LegSeries env = LegSeries::from_real(envelope);
  std::vector<cdouble> hs(q), gs(q);
  for (std::size_t i = 0; i < q; ++i) {
    const double t = rule.nodes[i];
    const cdouble wave = std::exp(cdouble{0.0, k * R0 * t}) * synthesize(env, t);
    hs[i] = wave;
    gs[i] = wave * cdouble{0.0, k * t};
  }
  BoundaryData b;
  b.R0 = R0;
  b.h = project(hs, rule, n).coeffs();
  b.g = project(gs, rule, n).coeffs();
  return b;
}

}  // namespace nlhelm
