#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlhelm/chebyshev.hpp"
#include "nlhelm/legendre.hpp"
#include "nlhelm/ode.hpp"
#include "nlhelm/special.hpp"

namespace nlhelm {

/// How the intensity argument of F is formed from U.
///
/// `modulus` is U conj(U) = |U|^2 (the physical Kerr term, d = u * conj(u) in
/// coefficient space). `square` is the plain square U^2 (d = u * u), which is
/// what the built-in experiments evaluate; with it the per-ring identification
/// stays well conditioned near the inner sphere where |U| is nearly constant.
enum class IntensityMode { modulus, square };

std::string to_string(IntensityMode mode);
IntensityMode intensity_mode_from_string(const std::string& s);

/// nu(r) or eps(r): a constant, or piecewise-linear samples over [R0, R1].
class RadialProfile {
 public:
  RadialProfile() = default;
  static RadialProfile constant(double value);
  static RadialProfile tabulated(std::vector<double> r, std::vector<double> values);

  double operator()(double r) const;
  bool is_constant() const { return r_.empty(); }
  double constant_value() const { return value_; }
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double value_ = 0.0;
  std::vector<double> r_;
  std::vector<double> values_;
};

/// F in the right-hand side -eps F(s) U.
class Nonlinearity {
 public:
  enum class Kind { zero, power, sine, chebyshev, pointwise };

  static Nonlinearity zero();
  /// F(s) = s^p
  static Nonlinearity power(unsigned p);
  /// F(s) = sin(s)
  static Nonlinearity sine();
  static Nonlinearity chebyshev(ChebPoly p);
  /// Arbitrary F; `degree` is its polynomial degree when it has one.
  static Nonlinearity pointwise(std::function<cdouble(cdouble)> f, std::string name,
                                std::optional<unsigned> degree = std::nullopt);

  Kind kind() const { return kind_; }
  unsigned power_exponent() const { return p_; }
  const ChebPoly* cheb() const { return cheb_ ? &*cheb_ : nullptr; }
  const std::string& name() const { return name_; }
  std::optional<unsigned> polynomial_degree() const;

  /// Real intensity; a Chebyshev F throws IntensityOutOfRange outside its interval.
  double operator()(double s) const;
  /// Complex continuation (polynomials and sin extend analytically); no range check.
  cdouble operator()(cdouble s) const;

 private:
  Kind kind_ = Kind::zero;
  unsigned p_ = 0;
  std::optional<ChebPoly> cheb_;
  std::function<cdouble(cdouble)> fn_;
  std::string name_ = "zero";
  std::optional<unsigned> degree_;
};

/// Cauchy data on the inner sphere, as configured.
struct BoundarySpec {
  enum class Kind { plane_wave, modulated_plane_wave };
  Kind kind = Kind::plane_wave;
  std::vector<double> envelope;  // Legendre coefficients of A(t) for modulated_plane_wave
};

struct ForwardConfig {
  double k = 1.0;
  RadialProfile nu = RadialProfile::constant(1.0);
  RadialProfile eps = RadialProfile::constant(0.0);
  double R0 = 1.0;
  double R1 = 2.0;
  std::size_t N = 24;
  Nonlinearity nonlinearity = Nonlinearity::zero();
  IntensityMode intensity = IntensityMode::modulus;
  BoundarySpec boundary;
  std::size_t quadrature_size = 0;  // 0: chosen from N and F
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0: (R1 - R0) / 100
  double max_step = 0.0;      // 0: unbounded
  std::size_t max_steps = 1'000'000;

  /// Throws InputError naming the offending field.
  void validate() const;
  /// Quadrature nodes used by the pseudospectral nonlinear term.
  std::size_t resolved_quadrature_size() const;
};

BoundaryData make_boundary(const ForwardConfig& cfg);

/// Z = [r u_0 .. r u_N, v_0 .. v_N], v_l = d(r u_l)/dr.
using StateVector = std::vector<cdouble>;

struct Trajectory {
  std::vector<double> r;
  std::vector<StateVector> states;
  ForwardConfig config;
  OdeStats stats;

  std::size_t N() const { return states.empty() ? 0 : states.front().size() / 2 - 1; }
  /// u_l(r_j) = Z_l(r_j) / r_j
  LegSeries coefficients(std::size_t index) const;
};

StateVector initial_state(const BoundaryData& b, double R0);

/// Pseudospectral evaluation of the right-hand side. Holds the quadrature
/// matrices and scratch buffers; one instance per integration (not shareable
/// across threads while evaluating).
class SpectralSystem {
 public:
  explicit SpectralSystem(const ForwardConfig& cfg);

  std::size_t N() const { return n_; }
  const QuadratureRule& rule() const { return rule_; }

  /// Bare projection integrals int U F(s(U)) P_l dt, l = 0..N.
  std::vector<cdouble> nonlinear_term(std::span<const cdouble> u) const;
  void derivative(double r, std::span<const cdouble> z, std::span<cdouble> dz) const;

  /// U(t_q) at the quadrature nodes.
  void field_at_nodes(std::span<const cdouble> u, std::span<cdouble> out) const;

 private:
  void nonlinear_into(std::span<const cdouble> u, std::span<cdouble> out) const;

  ForwardConfig cfg_;
  std::size_t n_;
  QuadratureRule rule_;
  std::vector<double> synth_;    // Q x (N+1)
  std::vector<double> project_;  // (N+1) x Q, bare weights
  mutable std::vector<cdouble> u_, field_, work_, fl_;
  mutable std::vector<double> s_, f_;
};

/// 𝓕_0..𝓕_N by Gauss-Legendre quadrature of U F(s) P_l.
std::vector<cdouble> nonlinear_term_quadrature(const LegSeries& u, double r, const ForwardConfig& cfg);

/// 𝓕_0..𝓕_N through coefficient algebra: d = u*conj(u) (or u*u), b = F(tau(d))
/// by dyadic composition, c = b*u, 𝓕_l = 2 c_l / (2l+1).
std::vector<cdouble> nonlinear_term_spectral(const LegSeries& u, const ChebPoly& p,
                                             const GammaTable& table,
                                             IntensityMode mode = IntensityMode::modulus);
/// Gamma table degree nonlinear_term_spectral needs.
std::size_t spectral_table_degree(std::size_t n, std::size_t ncoeffs);

StateVector rhs(double r, const StateVector& z, const ForwardConfig& cfg);

Trajectory integrate(const ForwardConfig& cfg, const StateVector& z0);
/// make_boundary + initial_state + integrate.
Trajectory solve_forward(const ForwardConfig& cfg);

/// U(r_j, t) for each t in the grid.
std::vector<cdouble> field_at(const Trajectory& traj, std::size_t index, std::span<const double> t_grid);

}  // namespace nlhelm
