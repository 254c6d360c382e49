#include <doctest.h>

#include <cmath>
#include <random>

#include "nlhelm/errors.hpp"
#include "nlhelm/inverse.hpp"
#include "nlhelm/roundtrip.hpp"

using namespace nlhelm;

namespace {

ForwardConfig experiment1() {
  ForwardConfig cfg;
  cfg.k = 1.0;
  cfg.nu = RadialProfile::constant(0.1);
  cfg.eps = RadialProfile::constant(2.0);
  cfg.R0 = 1.0;
  cfg.R1 = 2.0;
  cfg.N = 24;
  cfg.nonlinearity = Nonlinearity::power(2);
  cfg.intensity = IntensityMode::square;
  cfg.rtol = 1e-8;
  cfg.atol = 1e-10;
  cfg.max_step = 5e-4;
  return cfg;
}

LegSeries random_series(std::mt19937_64& rng, std::size_t degree, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<cdouble> c(degree + 1);
  for (auto& x : c) x = {d(rng), d(rng)};
  return LegSeries(c);
}

}  // namespace

TEST_CASE("stencil") {
  CHECK(std::abs(second_derivative_nonuniform(1.0, 1.21, 1.5625, 0.1, 0.15) - 2.0) < 1e-13);
  CHECK(second_derivative_nonuniform(3.0, 3.0, 3.0, 0.2, 0.01) == cdouble(0.0));
  const double h = 1e-3;
  const auto r4 = [](double r) { return r * r * r * r; };
  CHECK(std::abs(second_derivative_nonuniform(r4(2 - h), r4(2), r4(2 + h), h, h) - 48.0) < 1e-5);
  CHECK_THROWS_AS(second_derivative_nonuniform(0.0, 0.0, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(second_derivative_nonuniform(0.0, 0.0, 0.0, 1.0, -1.0), DomainError);
}

TEST_CASE("recover_F_ell") {
  // u_l(r) = r for every l: r u = r^2, so the stencil returns 2 exactly.
  RingSamples ring;
  ring.r = {1.0, 1.1, 1.25};
  for (std::size_t i = 0; i < 3; ++i) ring.u[i] = LegSeries(std::vector<cdouble>(4, ring.r[i]));
  const double k = 1.5, nu = 0.3, eps = 2.0;
  const auto f = recover_F_ell(ring, k, RadialProfile::constant(nu), RadialProfile::constant(eps));
  for (std::size_t l = 0; l < 4; ++l) {
    const double r = 1.1, lam = l * (l + 1.0);
    const double expected = -2.0 / ((2.0 * l + 1.0) * eps) * (2.0 / r - lam / (r * r) * r + k * k * nu * r);
    CHECK(std::abs(f[l] - expected) < 1e-13);
  }
  CHECK_THROWS_AS(recover_F_ell(ring, k, RadialProfile::constant(nu), RadialProfile::constant(0.0)), DomainError);
  std::swap(ring.r[0], ring.r[1]);
  CHECK_THROWS_AS(recover_F_ell(ring, k, RadialProfile::constant(nu), RadialProfile::constant(1.0)), DomainError);
}

TEST_CASE("zero nonlinearity recovers a vanishing term") {
  ForwardConfig cfg = experiment1();
  cfg.R1 = 1.1;
  cfg.nonlinearity = Nonlinearity::zero();
  const auto traj = solve_forward(cfg);
  for (std::size_t j = 1; j + 1 < traj.r.size(); j += 17) {
    RingSamples ring;
    for (std::size_t s = 0; s < 3; ++s) {
      ring.r[s] = traj.r[j - 1 + s];
      ring.u[s] = traj.coefficients(j - 1 + s);
    }
    const auto f = recover_F_ell(ring, cfg.k, cfg.nu, cfg.eps);
    for (const auto& x : f) CHECK(std::abs(x) < 1e-4);
  }
}

TEST_CASE("recovered term matches the forward nonlinear term") {
  ForwardConfig cfg = experiment1();
  cfg.R1 = 1.05;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  const auto traj = solve_forward(cfg);
  for (std::size_t j = 5; j + 1 < traj.r.size(); j += 20) {
    RingSamples ring;
    for (std::size_t s = 0; s < 3; ++s) {
      ring.r[s] = traj.r[j - 1 + s];
      ring.u[s] = traj.coefficients(j - 1 + s);
    }
    const auto f = recover_F_ell(ring, cfg.k, cfg.nu, cfg.eps);
    const auto ref = nonlinear_term_quadrature(ring.u[1], ring.r[1], cfg);
    double scale = 0.0, err = 0.0;
    for (std::size_t l = 0; l < ref.size(); ++l) {
      scale = std::max(scale, std::abs(ref[l]));
      err = std::max(err, std::abs(f[l] - ref[l]));
    }
    const double h = std::max(ring.r[1] - ring.r[0], ring.r[2] - ring.r[1]);
    CHECK(err <= std::max(1e-6, 10.0 * h * h) * std::max(1.0, scale));
  }
}

TEST_CASE("design matrix") {
  std::mt19937_64 rng(9);
  const LegSeries u = random_series(rng, 6, 0.3);
  InverseConfig cfg;
  cfg.K = 5;
  cfg.interval = {-0.5, 1.5};
  const auto table = build_gamma_table(design_table_degree(u.degree(), cfg));
  for (IntensityMode mode : {IntensityMode::modulus, IntensityMode::square}) {
    cfg.intensity = mode;
    const auto M = design_matrix(u, cfg, table);
    REQUIRE(M.rows() == 7);
    REQUIRE(M.cols() == 5);
    for (Eigen::Index l = 0; l < 7; ++l) CHECK(std::abs(M(l, 0) - 2.0 * u[l] / (2.0 * l + 1.0)) < 1e-15);

    // M a equals the quadrature nonlinear term of F = sum a_k T_k.
    const std::vector<double> a{0.3, -0.2, 0.1, 0.05, -0.4};
    ForwardConfig fc;
    fc.N = 6;
    fc.intensity = mode;
    fc.nonlinearity = Nonlinearity::pointwise(
        [&](cdouble s) { return cheb_eval(ChebPoly(a, cfg.interval), s); }, "cheb", 4);
    const auto ref = nonlinear_term_quadrature(u, 1.0, fc);
    const Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.data(), 5);
    const Eigen::VectorXcd pred = M * av.cast<cdouble>();
    for (Eigen::Index l = 0; l < 7; ++l) CHECK(std::abs(pred(l) - ref[l]) < 1e-10);

    // Linear in a.
    const Eigen::VectorXd b = Eigen::VectorXd::Random(5);
    const Eigen::VectorXcd lhs = M * (av + b).cast<cdouble>();
    const Eigen::VectorXcd rhs = M * av.cast<cdouble>() + M * b.cast<cdouble>();
    CHECK((lhs - rhs).norm() < 1e-14);
  }

  // Scalar field: M[0][k] = 2c T_k(tau(|c|^2)).
  const cdouble c(0.6, -0.3);
  const double s = std::norm(c);
  InverseConfig sc;
  sc.K = 4;
  sc.interval = {0.0, 2.0 * s};
  const auto M0 = design_matrix(LegSeries{c}, sc, build_gamma_table(8));
  const double tau = sc.interval.to_unit(s);
  for (Eigen::Index k = 0; k < 4; ++k) CHECK(std::abs(M0(0, k) - 2.0 * c * std::cos(k * std::acos(tau))) < 1e-15);

  InverseConfig big;
  big.K = 8;
  CHECK_THROWS_AS(design_matrix(u, big, build_gamma_table(10)), TableTooSmall);
}

TEST_CASE("solve_ring") {
  std::mt19937_64 rng(13);
  const LegSeries u = random_series(rng, 8, 0.4);
  InverseConfig cfg;
  cfg.K = 3;
  const auto table = build_gamma_table(design_table_degree(8, cfg));
  const auto M = design_matrix(u, cfg, table);
  const Eigen::VectorXd a_true = (Eigen::VectorXd(3) << 0.5, 0.0, 0.5).finished();
  const Eigen::VectorXcd f = M * a_true.cast<cdouble>();
  std::vector<cdouble> fv(f.data(), f.data() + f.size());
  const auto sol = solve_ring(fv, M, cfg);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(sol.a[k] - a_true(k)) < 1e-12);
  CHECK(sol.residual_norm < 1e-13);
  CHECK(sol.rank == 3);
  CHECK(std::isfinite(sol.condition_estimate));

  // Ridge pulls the solution toward zero.
  cfg.ridge = 1e2;
  const auto shrunk = solve_ring(fv, M, cfg);
  CHECK(std::hypot(shrunk.a[0], shrunk.a[2]) < std::hypot(sol.a[0], sol.a[2]));

  // Rank deficiency: duplicated column, minimum-norm answer, infinite-ish condition.
  Eigen::MatrixXcd D(M.rows(), 2);
  D.col(0) = M.col(0);
  D.col(1) = M.col(0);
  InverseConfig c2;
  c2.K = 2;
  const Eigen::VectorXcd g = M.col(0);
  std::vector<cdouble> gv(g.data(), g.data() + g.size());
  const auto mn = solve_ring(gv, D, c2);
  CHECK(mn.rank == 1);
  CHECK(std::abs(mn.a[0] - 0.5) < 1e-12);
  CHECK(std::abs(mn.a[1] - 0.5) < 1e-12);
  CHECK(mn.condition_estimate > 1e12);

  CHECK_THROWS_AS(solve_ring(std::span<const cdouble>(fv.data(), 2), M, cfg), DomainError);
}

TEST_CASE("invert reproduces the squared intensity nonlinearity") {
  const auto traj = solve_forward(experiment1());
  InverseConfig cfg;
  cfg.K = 3;
  cfg.interval = {-1.0, 1.0};
  cfg.intensity = IntensityMode::square;
  cfg.rings.kind = RingSelection::Kind::radius_range;
  cfg.rings.r_min = 1.0;
  cfg.rings.r_max = 1.05;
  const auto res = invert(traj, cfg);
  REQUIRE(res.rings.size() > 50);
  std::size_t good = 0;
  for (std::size_t i = 0; i < res.rings.size(); ++i) {
    const auto& ring = res.rings[i];
    if (i > 0) CHECK(ring.r > res.rings[i - 1].r);
    CHECK(ring.r >= 1.0);
    CHECK(ring.r <= 1.05);
    if (std::abs(ring.a[0] - 0.5) <= 1e-2 && std::abs(ring.a[1]) <= 1e-2 && std::abs(ring.a[2] - 0.5) <= 1e-2) ++good;
  }
  CHECK(good >= 0.9 * res.rings.size());

  // Parallel and serial runs give the same ordered results.
  InverseConfig one = cfg;
  one.threads = 1;
  InverseConfig many = cfg;
  many.threads = 4;
  const auto a = invert(traj, one), b = invert(traj, many);
  REQUIRE(a.rings.size() == b.rings.size());
  for (std::size_t i = 0; i < a.rings.size(); ++i) {
    CHECK(a.rings[i].index == b.rings[i].index);
    CHECK(a.rings[i].a == b.rings[i].a);
  }

  InverseConfig idx = cfg;
  idx.rings.kind = RingSelection::Kind::indices;
  idx.rings.indices = {0, 5, traj.r.size() - 1};
  const auto only = invert(traj, idx);
  REQUIRE(only.rings.size() == 1);
  CHECK(only.rings[0].index == 5);
}

TEST_CASE("invert rejects short trajectories") {
  auto traj = solve_forward([] {
    auto c = experiment1();
    c.R1 = 1.01;
    return c;
  }());
  traj.r.resize(2);
  traj.states.resize(2);
  InverseConfig cfg;
  CHECK_THROWS_WITH_AS(invert(traj, cfg), doctest::Contains("no interior rings"), DomainError);
}

TEST_CASE("estimate_bounds") {
  ForwardConfig cfg = experiment1();
  cfg.R1 = 1.2;
  cfg.nonlinearity = Nonlinearity::zero();
  auto traj = solve_forward(cfg);
  // Only the inner sphere: |e^{i t}|^2 = 1, degenerate and widened.
  Trajectory first = traj;
  first.r.resize(1);
  first.states.resize(1);
  const auto iv = estimate_bounds(first, 32);
  CHECK(iv.beta > iv.alpha);
  CHECK(iv.alpha < 1.0);
  CHECK(iv.beta > 1.0);
  CHECK(iv.beta - iv.alpha < 1e-7);

  const auto all = estimate_bounds(traj, 64);
  const auto rule = gauss_legendre(64);
  double lo = 1e300, hi = -1e300;
  for (std::size_t j = 0; j < traj.r.size(); ++j) {
    for (const auto& x : field_at(traj, j, rule.nodes)) {
      lo = std::min(lo, std::norm(x));
      hi = std::max(hi, std::norm(x));
    }
  }
  CHECK(all.alpha <= lo);
  CHECK(all.beta >= hi);
  CHECK(std::abs((lo - all.alpha) - 0.01 * (hi - lo)) < 1e-12);
  CHECK(std::abs((all.beta - hi) - 0.01 * (hi - lo)) < 1e-12);
}

TEST_CASE("roundtrip with a random Chebyshev nonlinearity") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RoundtripConfig cfg = default_roundtrip_config();
    cfg.seed = seed;
    const auto r = run_roundtrip(cfg);
    CHECK(r.truth.size() == 4);
    for (double a : r.truth.coeffs()) CHECK(std::abs(a) <= 0.5);
    CHECK(r.median_error <= 1e-3);
    CHECK(r.ring_errors.size() == r.inverse.rings.size());
  }
  // Same seed, same answer.
  RoundtripConfig cfg = default_roundtrip_config();
  cfg.seed = 5;
  CHECK(run_roundtrip(cfg).inverse.rings[10].a == run_roundtrip(cfg).inverse.rings[10].a);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}
