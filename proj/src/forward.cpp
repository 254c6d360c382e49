#include "nlhelm/forward.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "nlhelm/errors.hpp"
#include "nlhelm/kernels.hpp"

namespace nlhelm {

std::string to_string(IntensityMode mode) {
  return mode == IntensityMode::modulus ? "modulus" : "square";
}

IntensityMode intensity_mode_from_string(const std::string& s) {
  if (s == "modulus") return IntensityMode::modulus;
  if (s == "square") return IntensityMode::square;
  throw InputError("intensity: expected \"modulus\" or \"square\", got \"" + s + "\"");
}

// ---------------------------------------------------------------------------

RadialProfile RadialProfile::constant(double value) {
  RadialProfile p;
  p.value_ = value;
  return p;
}

RadialProfile RadialProfile::tabulated(std::vector<double> r, std::vector<double> values) {
  if (r.size() != values.size() || r.size() < 2) {
    throw InputError("tabulated profile: need at least two (r, value) pairs of equal length");
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw InputError("tabulated profile: radii must be strictly increasing");
  }
  RadialProfile p;
  p.r_ = std::move(r);
  p.values_ = std::move(values);
  return p;
}

double RadialProfile::operator()(double r) const {
  if (r_.empty()) return value_;
  if (r <= r_.front()) return values_.front();
  if (r >= r_.back()) return values_.back();
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - r_.begin());
  const double w = (r - r_[i - 1]) / (r_[i] - r_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

// ---------------------------------------------------------------------------

Nonlinearity Nonlinearity::zero() { return {}; }

Nonlinearity Nonlinearity::power(unsigned p) {
  Nonlinearity f;
  f.kind_ = Kind::power;
  f.p_ = p;
  f.name_ = "power";
  return f;
}

Nonlinearity Nonlinearity::sine() {
  Nonlinearity f;
  f.kind_ = Kind::sine;
  f.name_ = "sin";
  return f;
}

Nonlinearity Nonlinearity::chebyshev(ChebPoly p) {
  Nonlinearity f;
  f.kind_ = Kind::chebyshev;
  f.cheb_ = std::move(p);
  f.name_ = "chebyshev";
  return f;
}

Nonlinearity Nonlinearity::pointwise(std::function<cdouble(cdouble)> fn, std::string name,
                                     std::optional<unsigned> degree) {
  Nonlinearity f;
  f.kind_ = Kind::pointwise;
  f.fn_ = std::move(fn);
  f.name_ = std::move(name);
  f.degree_ = degree;
  return f;
}

std::optional<unsigned> Nonlinearity::polynomial_degree() const {
  switch (kind_) {
    case Kind::zero: return 0u;
    case Kind::power: return p_;
    case Kind::chebyshev: return static_cast<unsigned>(cheb_->size() - 1);
    case Kind::pointwise: return degree_;
    case Kind::sine: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

template <typename T>
T ipow(T s, unsigned p) {
  T out{1.0};
  while (p) {
    if (p & 1u) out *= s;
    s *= s;
    p >>= 1u;
  }
  return out;
}

}  // namespace

double Nonlinearity::operator()(double s) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::power: return ipow(s, p_);
    case Kind::sine: return std::sin(s);
    case Kind::chebyshev: return cheb_eval(*cheb_, s);
    case Kind::pointwise: return fn_(cdouble{s, 0.0}).real();
  }
  return 0.0;
}

cdouble Nonlinearity::operator()(cdouble s) const {
  switch (kind_) {
    case Kind::zero: return {};
    case Kind::power: return ipow(s, p_);
    case Kind::sine: return std::sin(s);
    case Kind::chebyshev: return cheb_eval(*cheb_, s);
    case Kind::pointwise: return fn_(s);
  }
  return {};
}

// ---------------------------------------------------------------------------

void ForwardConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InputError("config field '" + field + "': " + why);
  };
  if (!(k > 0.0)) fail("k", "must be positive");
  if (!(R0 > 0.0)) fail("R0", "must be positive (the equation is singular at r = 0)");
  if (!(R1 > R0)) fail("R1", "must exceed R0");
  if (!(rtol > 0.0)) fail("rtol", "must be positive");
  if (!(atol > 0.0)) fail("atol", "must be positive");
  if (initial_step < 0.0) fail("initial_step", "must be non-negative");
  if (max_step < 0.0) fail("max_step", "must be non-negative");
  if (boundary.kind == BoundarySpec::Kind::modulated_plane_wave && boundary.envelope.empty()) {
    fail("boundary.envelope", "must be non-empty");
  }
  if (quadrature_size != 0 && quadrature_size < N + 1) fail("quadrature_size", "must be at least N+1");
}

std::size_t ForwardConfig::resolved_quadrature_size() const {
  if (quadrature_size != 0) return quadrature_size;
  const auto p = nonlinearity.polynomial_degree();
  if (!p) return 4 * N + 16;
  // integrand U F(s) P_l has degree (2p+1)N + N
  const std::size_t degree = (2 * *p + 1) * N + N;
  return std::max(N + 1, (degree + 1) / 2 + 1);
}

BoundaryData make_boundary(const ForwardConfig& cfg) {
  switch (cfg.boundary.kind) {
    case BoundarySpec::Kind::plane_wave: return plane_wave_coeffs(cfg.k, cfg.R0, cfg.N);
    case BoundarySpec::Kind::modulated_plane_wave:
      return modulated_plane_wave(cfg.k, cfg.R0, cfg.N, cfg.boundary.envelope);
  }
  return plane_wave_coeffs(cfg.k, cfg.R0, cfg.N);
}

LegSeries Trajectory::coefficients(std::size_t index) const {
  const auto& z = states.at(index);
  const std::size_t n = z.size() / 2;
  std::vector<cdouble> u(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  for (auto& c : u) c /= r[index];
  return LegSeries(std::move(u));
}

StateVector initial_state(const BoundaryData& b, double R0) {
  const std::size_t n = b.h.size();
  StateVector z(2 * n);
  for (std::size_t l = 0; l < n; ++l) {
    z[l] = R0 * b.h[l];
    z[n + l] = b.h[l] + R0 * b.g[l];
  }
  return z;
}

// ---------------------------------------------------------------------------

SpectralSystem::SpectralSystem(const ForwardConfig& cfg)
    : cfg_(cfg), n_(cfg.N), rule_(gauss_legendre(cfg.resolved_quadrature_size())) {
  synth_ = legendre_matrix(rule_, n_);
  project_ = projection_matrix(rule_, n_, false);
  const std::size_t q = rule_.size();
  u_.resize(n_ + 1);
  fl_.resize(n_ + 1);
  field_.resize(q);
  work_.resize(q);
  s_.resize(q);
  f_.resize(q);
}

void SpectralSystem::field_at_nodes(std::span<const cdouble> u, std::span<cdouble> out) const {
  kernels::real_matvec(synth_, n_ + 1, u, out);
}

void SpectralSystem::nonlinear_into(std::span<const cdouble> u, std::span<cdouble> out) const {
  const auto& F = cfg_.nonlinearity;
  if (F.kind() == Nonlinearity::Kind::zero) {
    std::fill(out.begin(), out.end(), cdouble{});
    return;
  }
  const std::size_t q = rule_.size();
  field_at_nodes(u, field_);
  if (cfg_.intensity == IntensityMode::modulus) {
    kernels::abs2(field_, s_);
    if (F.kind() == Nonlinearity::Kind::chebyshev) {
      cheb_eval_many(*F.cheb(), s_, f_);
    } else {
      for (std::size_t i = 0; i < q; ++i) f_[i] = F(s_[i]);
    }
    std::copy(field_.begin(), field_.end(), work_.begin());
    kernels::scale(f_, work_);
  } else {
    for (std::size_t i = 0; i < q; ++i) work_[i] = field_[i] * F(field_[i] * field_[i]);
  }
  kernels::real_matvec(project_, q, work_, out);
}

std::vector<cdouble> SpectralSystem::nonlinear_term(std::span<const cdouble> u) const {
  std::vector<cdouble> out(n_ + 1);
  nonlinear_into(u, out);
  return out;
}

void SpectralSystem::derivative(double r, std::span<const cdouble> z, std::span<cdouble> dz) const {
  const std::size_t m = n_ + 1;
  for (std::size_t l = 0; l < m; ++l) u_[l] = z[l] / r;
  nonlinear_into(u_, fl_);
  const double k2nu = cfg_.k * cfg_.k * cfg_.nu(r);
  const double reps = r * cfg_.eps(r);
  for (std::size_t l = 0; l < m; ++l) {
    const double ld = static_cast<double>(l);
    const double lambda = ld * (ld + 1.0);
    dz[l] = z[m + l];
    dz[m + l] = (lambda / (r * r) - k2nu) * z[l] - reps * (ld + 0.5) * fl_[l];
  }
}

std::vector<cdouble> nonlinear_term_quadrature(const LegSeries& u, double /*r*/,
                                               const ForwardConfig& cfg) {
  ForwardConfig c = cfg;
  c.N = u.degree();
  if (c.quadrature_size != 0 && c.quadrature_size < c.N + 1) c.quadrature_size = 0;
  const SpectralSystem sys(c);
  return sys.nonlinear_term(u.coeffs());
}

std::size_t spectral_table_degree(std::size_t n, std::size_t ncoeffs) {
  const std::size_t padded = std::bit_ceil(std::max<std::size_t>(ncoeffs, 1));
  // composition of the degree-2N intensity, then the truncated product with u
  return std::max((padded - 1) * 2 * n, 2 * n);
}

std::vector<cdouble> nonlinear_term_spectral(const LegSeries& u, const ChebPoly& p,
                                             const GammaTable& table, IntensityMode mode) {
  const std::size_t n = u.degree();
  LegSeries d = star_convolve(u, mode == IntensityMode::modulus ? u.conj() : u, table);
  if (mode == IntensityMode::modulus) {
    for (auto& c : d.coeffs()) c = {c.real(), 0.0};
  }
  const LegSeries b = compose_dyadic(p, d, table);
  const LegSeries c = star_convolve_truncated(b, u, table, n);
  std::vector<cdouble> out(n + 1);
  for (std::size_t l = 0; l <= n; ++l) out[l] = 2.0 * c[l] / (2.0 * static_cast<double>(l) + 1.0);
  return out;
}

StateVector rhs(double r, const StateVector& z, const ForwardConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("rhs: r must be positive");
  const SpectralSystem sys(cfg);
  StateVector dz(z.size());
  sys.derivative(r, z, dz);
  return dz;
}

Trajectory integrate(const ForwardConfig& cfg, const StateVector& z0) {
  cfg.validate();
  if (z0.size() != 2 * (cfg.N + 1)) {
    throw InputError("integrate: state length " + std::to_string(z0.size()) + " does not match N=" +
                     std::to_string(cfg.N));
  }
  const SpectralSystem sys(cfg);
  Trajectory traj;
  traj.config = cfg;
  OdeOptions opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  opts.initial_step = cfg.initial_step;
  opts.max_step = cfg.max_step;
  opts.max_steps = cfg.max_steps;
  traj.stats = integrate_dopri5(
      [&sys](double r, std::span<const cdouble> z, std::span<cdouble> dz) { sys.derivative(r, z, dz); },
      cfg.R0, cfg.R1, z0, opts, [&traj](double r, std::span<const cdouble> z) {
        traj.r.push_back(r);
        traj.states.emplace_back(z.begin(), z.end());
      });
  return traj;
}

Trajectory solve_forward(const ForwardConfig& cfg) {
  cfg.validate();
  return integrate(cfg, initial_state(make_boundary(cfg), cfg.R0));
}

std::vector<cdouble> field_at(const Trajectory& traj, std::size_t index, std::span<const double> t_grid) {
  if (index >= traj.r.size()) throw DomainError("field_at: index out of range");
  const LegSeries u = traj.coefficients(index);
  const std::size_t m = u.size();
  std::vector<double> p(t_grid.size() * m);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(std::abs(t_grid[i]) <= 1.0)) throw DomainError("field_at: |t| > 1");
    legendre_eval_into(t_grid[i], std::span<double>(p).subspan(i * m, m));
  }
  std::vector<cdouble> out(t_grid.size());
  kernels::real_matvec(p, m, u.coeffs(), out);
  return out;
}

}  // namespace nlhelm
