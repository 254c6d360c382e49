#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "nlhelm/errors.hpp"
#include "nlhelm/legendre.hpp"
#include "nlhelm/special.hpp"

using namespace nlhelm;

TEST_CASE("spherical Bessel closed forms and decay") {
  const auto j = spherical_bessel_j(20, 1.0);
  CHECK(std::abs(j[0] - 0.8414709848078965) < 1e-15);
  CHECK(std::abs(j[1] - 0.30116867893975674) < 1e-15);
  CHECK(j[20] < 1e-20);
  CHECK(j[20] > 0.0);
  for (std::size_t l = 2; l <= 20; ++l) CHECK(j[l] < j[l - 1]);
  CHECK_THROWS_AS(spherical_bessel_j(3, 0.0), DomainError);
  CHECK_THROWS_AS(spherical_bessel_j(3, -1.0), DomainError);
}

TEST_CASE("spherical Bessel against Boost over l <= 100, x <= 100") {
  double worst = 0.0;
  for (double x : {0.01, 0.3, 1.0, 2.0, 5.0, 17.5, 41.0, 99.0}) {
    const auto j = spherical_bessel_j(100, x);
    for (unsigned l = 0; l <= 100; ++l) {
      const double ref = boost::math::sph_bessel(l, x);
      if (ref == 0.0 || std::abs(ref) < 1e-290) continue;
      worst = std::max(worst, std::abs(j[l] - ref) / std::abs(ref));
    }
    // Three-term recurrence.
    for (std::size_t l = 1; l < 100; ++l) {
      const double lhs = j[l - 1] + j[l + 1];
      const double rhs = (2.0 * l + 1.0) / x * j[l];
      if (std::abs(rhs) > 1e-280) CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), std::abs(j[l - 1])));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("cylindrical Bessel J") {
  auto J = bessel_J(5, 0.0);
  CHECK(J[0] == 1.0);
  for (std::size_t k = 1; k <= 5; ++k) CHECK(J[k] == 0.0);
  J = bessel_J(3, 0.5);
  CHECK(std::abs(J[0] - 0.9384698072408129) < 1e-15);
  double worst = 0.0;
  for (double z : {-7.5, -0.5, 0.25, 1.0, 3.9, 4.1, 8.0, 12.0, 20.0, 35.0, 50.0}) {
    const auto v = bessel_J(40, z);
    for (int k = 0; k <= 40; ++k) worst = std::max(worst, std::abs(v[k] - boost::math::cyl_bessel_j(k, z)));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("i^l is exact") {
  CHECK(i_pow(0) == cdouble(1, 0));
  CHECK(i_pow(1) == cdouble(0, 1));
  CHECK(i_pow(2) == cdouble(-1, 0));
  CHECK(i_pow(3) == cdouble(0, -1));
  CHECK(i_pow(401) == cdouble(0, 1));
}

TEST_CASE("plane wave coefficients") {
  auto b = plane_wave_coeffs(1.0, 1.0, 30);
  CHECK(std::abs(b.h[0] - 0.8414709848078965) < 1e-15);
  CHECK(std::abs(b.h[1] - cdouble(0.0, 0.9035060368192702)) < 1e-15);
  const LegSeries h(b.h);
  for (int i = 0; i < 64; ++i) {
    const double t = -1.0 + 2.0 * i / 63.0;
    CHECK(std::abs(synthesize(h, t) - std::exp(cdouble(0.0, t))) < 1e-10);
  }
  for (double kr : {1.0, 5.0}) {
    const auto n = static_cast<std::size_t>(kr) + 40;
    const LegSeries hh(plane_wave_coeffs(kr, 1.0, n).h);
    for (int i = 0; i < 64; ++i) {
      const double t = -1.0 + 2.0 * i / 63.0;
      CHECK(std::abs(synthesize(hh, t) - std::exp(cdouble(0.0, kr * t))) <= 1e-9);
    }
  }
}

TEST_CASE("g_l is the radial derivative of h_l") {
  for (double k : {1.0, 2.5}) {
    const double R0 = 1.3, step = 1e-6;
    const auto b = plane_wave_coeffs(k, R0, 20);
    const auto jp = spherical_bessel_j(20, k * (R0 + step));
    const auto jm = spherical_bessel_j(20, k * (R0 - step));
    for (std::size_t l = 0; l <= 20; ++l) {
      const cdouble fd = (2.0 * l + 1.0) * i_pow(l) * (jp[l] - jm[l]) / (2.0 * step);
      CHECK(std::abs(b.g[l] - fd) < 1e-7);
    }
    // Whole field: dU/dr = i k t e^{i k R0 t}.
    const LegSeries g(b.g);
    for (double t : {-0.8, 0.1, 0.9}) {
      CHECK(std::abs(synthesize(g, t) - cdouble(0.0, k * t) * std::exp(cdouble(0.0, k * R0 * t))) < 1e-10);
    }
  }
}

TEST_CASE("modulated plane wave") {
  const double k = 1.5, R0 = 1.0;
  const std::vector<double> env{1.0, 0.5};
  const auto b = modulated_plane_wave(k, R0, 40, env);
  const LegSeries h(b.h), g(b.g);
  for (double t : {-1.0, -0.4, 0.0, 0.6, 1.0}) {
    const cdouble e = std::exp(cdouble(0.0, k * R0 * t));
    const double a = 1.0 + 0.5 * t;
    CHECK(std::abs(synthesize(h, t) - a * e) < 1e-12);
    CHECK(std::abs(synthesize(g, t) - a * cdouble(0.0, k * t) * e) < 1e-12);
  }
  // A unit envelope reproduces the plain plane wave.
  const auto p = plane_wave_coeffs(k, R0, 30);
  const auto m = modulated_plane_wave(k, R0, 30, {1.0});
  for (std::size_t l = 0; l <= 30; ++l) {
    CHECK(std::abs(p.h[l] - m.h[l]) < 1e-13);
    CHECK(std::abs(p.g[l] - m.g[l]) < 1e-13);
  }
}
