#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nlhelm/legendre.hpp"

namespace nlhelm {

struct Interval {
  double alpha = -1.0;
  double beta = 1.0;

  double width() const { return beta - alpha; }
  /// Affine pullback onto [-1, 1].
  double to_unit(double s) const { return (2.0 * s - alpha - beta) / (beta - alpha); }
  cdouble to_unit(cdouble s) const { return (2.0 * s - alpha - beta) / (beta - alpha); }
  bool contains(double s) const { return s >= alpha && s <= beta; }
};

/// sum_k a_k T_k(tau(s)) on [alpha, beta].
class ChebPoly {
 public:
  ChebPoly(std::vector<double> a, Interval interval);

  const std::vector<double>& coeffs() const { return a_; }
  const Interval& interval() const { return interval_; }
  std::size_t size() const { return a_.size(); }

  /// Coefficients zero-padded to the next power of two (at least 1).
  ChebPoly padded_pow2() const;

 private:
  std::vector<double> a_;
  Interval interval_;
};

/// Throws IntensityOutOfRange outside [alpha, beta].
double cheb_eval(const ChebPoly& p, double s);
/// Polynomial continuation to complex arguments; no range check.
cdouble cheb_eval(const ChebPoly& p, cdouble s);
/// Values at many points through the SIMD Clenshaw kernel; checks the range.
void cheb_eval_many(const ChebPoly& p, std::span<const double> s, std::span<double> out);

/// Interpolant at K first-kind Chebyshev points mapped to the interval.
ChebPoly cheb_fit(const std::function<double(double)>& f, Interval interval, std::size_t k);

/// a_n = sin(gamma + n pi/2) q_n(z), gamma = (alpha+beta)/2, z = (beta-alpha)/2,
/// q_0 = J_0, q_n = 2 J_n: the Chebyshev expansion of sin(s) on the interval.
ChebPoly sin_reference_coeffs(Interval interval, std::size_t n_terms);

/// coeff_0 <- (2 d_0 - alpha - beta)/(beta - alpha), coeff_l <- 2 d_l/(beta - alpha).
LegSeries normalize_intensity(const LegSeries& d, Interval interval);

/// Work counters for the composition algorithms.
struct CompositionStats {
  std::size_t convolutions = 0;
  std::size_t ladder_convolutions = 0;
};

/// Legendre series of t -> sum_k a_k T_k(tau(f(t))), by Clenshaw's recurrence
/// with star products standing in for multiplication.
LegSeries compose_clenshaw(const ChebPoly& p, const LegSeries& f, const GammaTable& table,
                           CompositionStats* stats = nullptr);

/// Same result through the dyadic splitting of the Chebyshev index:
///   sum_{k<2m} a_k T_k = Q + 2 T_m R,  m = 2^(d-1),
///   Q = a_0 + sum_{0<k<m} (a_k - a_{2m-k}) T_k,
///   R = a_m/2 + sum_{0<j<m} a_{m+j} T_j,
/// recursing on Q and R with the ladder T_{2^j}(tau f) = 2 T_{2^(j-1)}^2 - 1.
LegSeries compose_dyadic(const ChebPoly& p, const LegSeries& f, const GammaTable& table,
                         CompositionStats* stats = nullptr);

/// Legendre series of T_0(g), ..., T_{count-1}(g) for a series g already mapped to [-1,1].
std::vector<LegSeries> chebyshev_ladder(const LegSeries& g, std::size_t count,
                                        const GammaTable& table);

/// Samples tau(f(t)) on 256 points; returns max |value| (> 1 + 1e-9 means misuse).
double composition_range_check(const LegSeries& f, Interval interval);

}  // namespace nlhelm
