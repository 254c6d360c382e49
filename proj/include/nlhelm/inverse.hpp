#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlhelm/chebyshev.hpp"
#include "nlhelm/forward.hpp"
#include "nlhelm/legendre.hpp"

namespace nlhelm {

/// Three consecutive radii and the coefficients u_l there.
struct RingSamples {
  std::array<double, 3> r{};
  std::array<LegSeries, 3> u;
};

struct RingSelection {
  enum class Kind { all_interior, indices, radius_range };
  Kind kind = Kind::all_interior;
  std::vector<std::size_t> indices;
  double r_min = 0.0;
  double r_max = 0.0;
};

struct InverseConfig {
  std::size_t K = 3;
  Interval interval{-1.0, 1.0};
  std::size_t L_max = 0;  // 0: use N
  RingSelection rings;
  double ridge = 0.0;
  IntensityMode intensity = IntensityMode::modulus;
  /// Caps worker threads for per-ring solves (0: hardware concurrency / NLHELM_THREADS).
  std::size_t threads = 0;

  void validate() const;
};

struct RingResult {
  std::size_t index = 0;
  double r = 0.0;
  std::vector<double> a;
  double residual_norm = 0.0;
  double condition_estimate = 0.0;
  std::size_t rank = 0;
};

struct InverseResult {
  std::vector<RingResult> rings;
};

/// (h- y+ + h+ y- - (h+ + h-) y0) / (0.5 h- h+ (h+ + h-)); exact on quadratics.
/// Evaluated as compensated divided differences, accurate to a few ulps of the
/// result for data lying exactly on a quadratic.
cdouble second_derivative_nonuniform(cdouble y_minus, cdouble y_0, cdouble y_plus, double h_minus,
                                     double h_plus);

/// 𝓕_l(r_j) = -2/((2l+1) eps) [ (1/r) (r u_l)'' - lambda_l/r^2 u_l + k^2 nu u_l ] at the centre radius.
std::vector<cdouble> recover_F_ell(const RingSamples& ring, double k, const RadialProfile& nu,
                                   const RadialProfile& eps);

/// Ring built from raw field samples U(r_i, t_q) on a Gauss-Legendre rule.
RingSamples ring_from_field_samples(const std::array<double, 3>& r,
                                    const std::array<std::vector<cdouble>, 3>& samples,
                                    const QuadratureRule& rule, std::size_t n);

/// Gamma table degree design_matrix needs for coefficients of degree n.
std::size_t design_table_degree(std::size_t n, const InverseConfig& cfg);

/// Columns k = 0..K-1: predicted 𝓕_l for F = T_k(tau(s)), so 𝓕 = M a.
Eigen::MatrixXcd design_matrix(const LegSeries& u, const InverseConfig& cfg, const GammaTable& table);

struct RingSolve {
  std::vector<double> a;
  double residual_norm = 0.0;
  double condition_estimate = 0.0;
  std::size_t rank = 0;
};

/// Real-stacked least squares [Re M; Im M] a = [Re F; Im F] by complete
/// orthogonal decomposition (minimum-norm when rank deficient), optional ridge.
RingSolve solve_ring(std::span<const cdouble> f_values, const Eigen::MatrixXcd& m, const InverseConfig& cfg);

/// Per-ring identification over a trajectory. Physics (k, nu, eps) comes from
/// the trajectory's config. Rings without two neighbours are skipped.
InverseResult invert(const Trajectory& traj, const InverseConfig& cfg);

/// [min, max] of |U|^2 over all radii and a Gauss-Legendre t-grid, widened by 1%
/// of the width on each side; widths below 1e-8 are first widened by 1e-8 each side.
Interval estimate_bounds(const Trajectory& traj, std::size_t t_grid_size);

}  // namespace nlhelm
