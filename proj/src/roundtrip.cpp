#include "nlhelm/roundtrip.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nlhelm/errors.hpp"

namespace nlhelm {

RoundtripConfig default_roundtrip_config() {
  RoundtripConfig cfg;
  auto& f = cfg.forward;
  f.k = 1.0;
  f.nu = RadialProfile::constant(0.1);
  f.eps = RadialProfile::constant(1.0);
  f.R0 = 1.0;
  f.R1 = 1.5;
  f.N = 24;
  f.intensity = IntensityMode::modulus;
  f.boundary.kind = BoundarySpec::Kind::modulated_plane_wave;
  f.boundary.envelope = {1.0, 0.5};
  f.rtol = 1e-10;
  f.atol = 1e-12;
  f.max_step = 1e-3;
  return cfg;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

namespace {

Interval widen_to_include(Interval iv, double value) {
  const double pad = 0.05 * iv.width();
  if (value < iv.alpha) iv.alpha = value - pad;
  if (value > iv.beta) iv.beta = value + pad;
  if (value >= iv.alpha && value <= iv.beta) {
    iv.alpha -= pad;
    iv.beta += pad;
  }
  return iv;
}

}  // namespace

RoundtripResult run_roundtrip(const RoundtripConfig& cfg) {
  if (cfg.K == 0) throw InputError("roundtrip config field 'K': must be at least 1");
  if (!(cfg.coefficient_bound > 0.0)) throw InputError("roundtrip config field 'coefficient_bound': must be positive");
  if (cfg.max_attempts == 0) throw InputError("roundtrip config field 'max_attempts': must be at least 1");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coeff(-cfg.coefficient_bound, cfg.coefficient_bound);
  std::vector<double> a(cfg.K);
  for (double& x : a) x = coeff(rng);

  ForwardConfig pilot = cfg.forward;
  pilot.nonlinearity = Nonlinearity::zero();
  Interval interval = estimate_bounds(solve_forward(pilot), cfg.bounds_grid);

  ForwardConfig fwd = cfg.forward;
  RoundtripResult out{ChebPoly(a, interval), {}, {}, 0.0, 0.0, 0, {}};
  for (;;) {
    ++out.attempts;
    out.truth = ChebPoly(a, interval);
    fwd.nonlinearity = Nonlinearity::chebyshev(out.truth);
    try {
      out.trajectory = solve_forward(fwd);
      break;
    } catch (const IntensityOutOfRange& e) {
      if (out.attempts >= cfg.max_attempts) {
        throw SolverError("roundtrip: intensity still outside the interval after " +
                          std::to_string(out.attempts) + " attempts (" + e.what() + ")");
      }
      interval = widen_to_include(interval, e.value());
    }
  }

  InverseConfig inv = cfg.inverse;
  inv.K = cfg.K;
  inv.interval = interval;
  inv.intensity = fwd.intensity;
  out.inverse = invert(out.trajectory, inv);

  for (const auto& ring : out.inverse.rings) {
    double err = 0.0;
    for (std::size_t k = 0; k < cfg.K; ++k) err = std::max(err, std::abs(ring.a[k] - a[k]));
    out.ring_errors.push_back(err);
  }
  out.median_error = median(out.ring_errors);
  out.max_error = out.ring_errors.empty() ? std::nan("")
                                          : *std::max_element(out.ring_errors.begin(), out.ring_errors.end());
  return out;
}

}  // namespace nlhelm
