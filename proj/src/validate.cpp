#include "nlhelm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nlhelm/chebyshev.hpp"
#include "nlhelm/forward.hpp"
#include "nlhelm/inverse.hpp"
#include "nlhelm/legendre.hpp"
#include "nlhelm/roundtrip.hpp"
#include "nlhelm/special.hpp"

namespace nlhelm {

namespace {

CheckResult make_check(std::string name, double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.tolerance = tolerance;
  return c;
}

// Records err; keeps the first case that breaks the tolerance.
void note(CheckResult& c, double err, const std::string& where) {
  if (!(err <= c.tolerance) && c.counterexample.empty()) c.counterexample = where;
  if (std::isnan(err)) {
    c.max_error = err;
  } else if (!std::isnan(c.max_error)) {
    c.max_error = std::max(c.max_error, err);
  }
}

void finish(CheckResult& c) { c.passed = c.counterexample.empty() && !std::isnan(c.max_error); }

std::string describe(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [k, v] : items) {
    out << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return out.str();
}

LegSeries random_series(std::mt19937_64& rng, std::size_t degree, bool complex_valued) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<cdouble> c(degree + 1);
  for (auto& x : c) x = {dist(rng), complex_valued ? dist(rng) : 0.0};
  return LegSeries(std::move(c));
}

}  // namespace

CheckResult check_gamma_normalization(std::size_t max_degree, bool corrupt) {
  CheckResult c = make_check("gamma_normalization", 1e-12);
  GammaTable table = build_gamma_table(max_degree);
  if (corrupt) table.mutable_block(3, 5)[1] += 0.25;
  for (std::size_t l = 0; l <= max_degree; ++l) {
    for (std::size_t lp = 0; lp <= max_degree; ++lp) {
      double sum = 0.0;
      double range_violation = 0.0;
      for (std::size_t L = 0; L <= l + lp; ++L) {
        const double g = table(L, l, lp);
        sum += g;
        range_violation = std::max({range_violation, -g, g - 1.0});
      }
      note(c, std::max(std::abs(sum - 1.0), range_violation),
           describe({{"l", double(l)}, {"l'", double(lp)}, {"row_sum", sum}}));
    }
  }
  finish(c);
  return c;
}

CheckResult check_gamma_quadrature(std::size_t max_degree) {
  CheckResult c = make_check("gamma_closed_form_vs_quadrature", 1e-12);
  // L runs up to l + l', so the integrand reaches degree 4 max_degree.
  const QuadratureRule rule = gauss_legendre(2 * max_degree + 2);
  std::vector<std::vector<double>> p(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) p[q] = legendre_eval_all(2 * max_degree, rule.nodes[q]);
  for (std::size_t l = 0; l <= max_degree; ++l) {
    for (std::size_t lp = 0; lp <= max_degree; ++lp) {
      for (std::size_t L = 0; L <= l + lp; ++L) {
        double integral = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) integral += rule.weights[q] * p[q][L] * p[q][l] * p[q][lp];
        const double expected = 0.5 * (2.0 * static_cast<double>(L) + 1.0) * integral;
        note(c, std::abs(gamma_coefficient(L, l, lp) - expected),
             describe({{"L", double(L)}, {"l", double(l)}, {"l'", double(lp)}}));
      }
    }
  }
  finish(c);
  return c;
}

CheckResult check_convolution(std::uint64_t seed, std::size_t cases) {
  CheckResult c = make_check("convolution_product_identity", 1e-11);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> deg(0, 16);
  const GammaTable table = build_gamma_table(32);
  const QuadratureRule grid = gauss_legendre(64);
  for (std::size_t i = 0; i < cases; ++i) {
    const LegSeries u = random_series(rng, deg(rng), true);
    const LegSeries v = random_series(rng, deg(rng), true);
    const LegSeries w = star_convolve(u, v, table);
    const double scale = 1.0 + u.l1_norm() * v.l1_norm();
    double err = 0.0;
    for (double t : grid.nodes) err = std::max(err, std::abs(synthesize(w, t) - synthesize(u, t) * synthesize(v, t)));
    note(c, err / scale, describe({{"case", double(i)}, {"deg_u", double(u.degree())}, {"deg_v", double(v.degree())}}));
  }
  finish(c);
  return c;
}

CheckResult check_composition(std::uint64_t seed, std::size_t cases) {
  CheckResult c = make_check("composition_oracles", 1e-10);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> depth(1, 4);
  std::uniform_int_distribution<std::size_t> deg(0, 8);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const GammaTable table = build_gamma_table(15 * 8 + 8);
  const QuadratureRule rule = gauss_legendre(128);
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t K = std::size_t{1} << depth(rng);
    std::vector<double> a(K);
    for (double& x : a) x = coeff(rng);
    const ChebPoly p(a, {-1.0, 1.0});
    // Real f with |f| <= 1 on [-1, 1], so tau(f) stays where T_k is bounded.
    LegSeries f = random_series(rng, deg(rng), false);
    f *= 1.0 / std::max(1.0, f.l1_norm());

    const LegSeries dyadic = compose_dyadic(p, f, table);
    const LegSeries clenshaw = compose_clenshaw(p, f, table);
    std::vector<cdouble> samples(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      samples[q] = cheb_eval(p, std::clamp(synthesize(f, rule.nodes[q]).real(), -1.0, 1.0));
    }
    const LegSeries direct = project(samples, rule, (K - 1) * f.degree());

    double err = 0.0;
    const std::size_t n = std::max({dyadic.size(), clenshaw.size(), direct.size()});
    for (std::size_t l = 0; l < n; ++l) {
      const cdouble x = l < dyadic.size() ? dyadic[l] : 0.0;
      const cdouble y = l < clenshaw.size() ? clenshaw[l] : 0.0;
      const cdouble z = l < direct.size() ? direct[l] : 0.0;
      err = std::max({err, std::abs(x - y), std::abs(x - z), std::abs(y - z)});
    }
    note(c, err, describe({{"case", double(i)}, {"K", double(K)}, {"deg_f", double(f.degree())}}));
  }
  finish(c);
  return c;
}

CheckResult check_stencil(std::uint64_t seed, std::size_t cases) {
  CheckResult c = make_check("stencil_quadratic_exactness", 1e-12);
  std::mt19937_64 rng(seed);
  // Radii, spacings and coefficients on dyadic grids keep every sample exactly
  // on the quadratic: spacings are multiples of 2^-16 in [1.07e-4, 1].
  const double quantum = std::ldexp(1.0, -16);
  std::uniform_real_distribution<double> log_steps(std::log(7.0), std::log(65536.0));
  std::uniform_int_distribution<int> centre(0, 65536);
  std::uniform_int_distribution<int> coeff(-1024, 1024);
  for (std::size_t i = 0; i < cases; ++i) {
    const double hm = std::round(std::exp(log_steps(rng))) * quantum;
    const double hp = std::round(std::exp(log_steps(rng))) * quantum;
    const double r0 = 1.0 + centre(rng) * quantum;
    const double a = coeff(rng) / 1024.0;
    const double b = coeff(rng) / 1024.0;
    double cc = coeff(rng) / 1024.0;
    if (cc == 0.0) cc = 1.0;
    auto y = [&](double r) { return cdouble{a + b * r + cc * r * r, cc * r * r - a}; };
    const cdouble d = second_derivative_nonuniform(y(r0 - hm), y(r0), y(r0 + hp), hm, hp);
    const double err = std::max(std::abs(d.real() - 2.0 * cc), std::abs(d.imag() - 2.0 * cc)) / std::abs(2.0 * cc);
    note(c, err, describe({{"h-", hm}, {"h+", hp}, {"r", r0}, {"a", a}, {"b", b}, {"c", cc}}));
  }
  finish(c);
  return c;
}

CheckResult check_plane_wave() {
  CheckResult c = make_check("plane_wave_synthesis", 1e-9);
  for (double kr : {1.0, 5.0}) {
    const auto n = static_cast<std::size_t>(kr) + 40;
    const BoundaryData b = plane_wave_coeffs(kr, 1.0, n);
    const LegSeries h(b.h);
    for (std::size_t i = 0; i < 64; ++i) {
      const double t = -1.0 + 2.0 * static_cast<double>(i) / 63.0;
      const double err = std::abs(synthesize(h, t) - std::exp(cdouble{0.0, kr * t}));
      note(c, err, describe({{"kR0", kr}, {"t", t}}));
    }
  }
  finish(c);
  return c;
}

CheckResult check_linear_case() {
  CheckResult c = make_check("linear_case_analytic", 1e-6);
  ForwardConfig cfg;
  cfg.k = 1.0;
  cfg.nu = RadialProfile::constant(1.0);
  cfg.eps = RadialProfile::constant(0.0);
  cfg.R0 = 1.0;
  cfg.R1 = 2.0;
  cfg.N = 30;
  cfg.rtol = 1e-9;
  cfg.atol = 1e-12;
  const Trajectory traj = solve_forward(cfg);
  const LegSeries u = traj.coefficients(traj.r.size() - 1);
  const auto j = spherical_bessel_j(cfg.N, cfg.k * cfg.R1);
  for (std::size_t l = 0; l <= cfg.N; ++l) {
    const cdouble exact = (2.0 * static_cast<double>(l) + 1.0) * i_pow(l) * j[l];
    note(c, std::abs(u[l] - exact), describe({{"l", double(l)}}));
  }
  finish(c);
  return c;
}

CheckResult check_roundtrip(std::uint64_t seed) {
  CheckResult c = make_check("roundtrip_median_ring_error", 1e-3);
  RoundtripConfig cfg = default_roundtrip_config();
  cfg.seed = seed;
  const RoundtripResult r = run_roundtrip(cfg);
  note(c, r.median_error, describe({{"seed", double(seed)}, {"rings", double(r.ring_errors.size())}}));
  finish(c);
  return c;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json item{{"name", c.name}, {"max_error", c.max_error}, {"tolerance", c.tolerance}, {"passed", c.passed}};
    if (!c.counterexample.empty()) item["counterexample"] = c.counterexample;
    list.push_back(std::move(item));
  }
  return {{"seed", seed}, {"passed", passed()}, {"checks", std::move(list)}};
}

ValidationReport run_validate(const ValidateOptions& opts) {
  ValidationReport report;
  report.seed = opts.seed;
  report.checks.push_back(check_gamma_normalization(40, opts.corrupt_gamma));
  report.checks.push_back(check_gamma_quadrature(20));
  report.checks.push_back(check_convolution(opts.seed, 50));
  report.checks.push_back(check_composition(opts.seed, 100));
  report.checks.push_back(check_stencil(opts.seed, 1000));
  report.checks.push_back(check_plane_wave());
  report.checks.push_back(check_linear_case());
  report.checks.push_back(check_roundtrip(opts.seed));
  return report;
}

}  // namespace nlhelm
