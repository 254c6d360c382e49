#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlhelm {

using cdouble = std::complex<double>;

/// Finite Legendre expansion g(t) = sum_l coeffs[l] * P_l(t).
///
/// Coefficients are always expansion coefficients (not bare projection
/// integrals), so the product identity synthesize(u*v) = synthesize(u)
/// synthesize(v) holds exactly with Gamma as the convolution weights.
class LegSeries {
 public:
  LegSeries() : coeffs_(1, cdouble{0.0, 0.0}) {}
  explicit LegSeries(std::vector<cdouble> coeffs);
  LegSeries(std::initializer_list<cdouble> coeffs);

  static LegSeries zeros(std::size_t degree) {
    return LegSeries(std::vector<cdouble>(degree + 1));
  }
  static LegSeries from_real(std::span<const double> coeffs);

  std::size_t degree() const { return coeffs_.size() - 1; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<cdouble>& coeffs() const { return coeffs_; }
  std::vector<cdouble>& coeffs() { return coeffs_; }
  cdouble operator[](std::size_t l) const { return l < coeffs_.size() ? coeffs_[l] : cdouble{}; }
  cdouble& operator[](std::size_t l) { return coeffs_[l]; }

  LegSeries conj() const;
  /// Keeps coefficients 0..degree, zero-padding if the series is shorter.
  LegSeries truncated(std::size_t degree) const;
  double l1_norm() const;

  LegSeries& operator+=(const LegSeries& o);
  LegSeries& operator-=(const LegSeries& o);
  LegSeries& operator*=(cdouble s);

 private:
  std::vector<cdouble> coeffs_;
};

LegSeries operator+(LegSeries a, const LegSeries& b);
LegSeries operator-(LegSeries a, const LegSeries& b);
LegSeries operator*(cdouble s, LegSeries a);

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// P_0(t) .. P_lmax(t) by the three-term recurrence. Throws DomainError for |t| > 1.
std::vector<double> legendre_eval_all(std::size_t lmax, double t);
/// Same, writing into out (size lmax+1); no allocation, no domain check.
void legendre_eval_into(double t, std::span<double> out);

/// Q-point Gauss-Legendre rule. Newton on P_Q from Chebyshev-like starts.
QuadratureRule gauss_legendre(std::size_t q);

/// coeffs[l] = (2l+1)/2 * sum_q w_q g(t_q) P_l(t_q).
LegSeries project(std::span<const cdouble> samples, const QuadratureRule& rule, std::size_t n);
cdouble synthesize(const LegSeries& s, double t);

/// Row-major (rows = node count, cols = n+1) matrix of P_l(t_q).
std::vector<double> legendre_matrix(const QuadratureRule& rule, std::size_t n);
/// Row-major ((n+1) x Q) projection matrix (2l+1)/2 w_q P_l(t_q) * scale(l).
std::vector<double> projection_matrix(const QuadratureRule& rule, std::size_t n, bool expansion_normalized);

/// Gamma(L; l, l') = (2L+1)/2 * int P_L P_l P_l'. Exact zero off the triangle/parity support.
double gamma_coefficient(std::size_t L, std::size_t l, std::size_t lp);

/// Precomputed Gamma values for 0 <= l, l' <= max_degree, all L in the triangle.
///
/// Only parity-valid entries are stored, one block per unordered pair (l <= l'),
/// each block holding the l+1 values L = l'-l, l'-l+2, ..., l'+l. Total footprint
/// is about max_degree^3 / 6 doubles (8 MB at max_degree 180, 60 MB at 360).
class GammaTable {
 public:
  explicit GammaTable(std::size_t max_degree);

  std::size_t max_degree() const { return max_degree_; }
  double operator()(std::size_t L, std::size_t l, std::size_t lp) const;

  /// Contiguous values for the pair, starting at L = |l-l'| with stride 2.
  std::span<const double> block(std::size_t l, std::size_t lp) const;
  std::span<double> mutable_block(std::size_t l, std::size_t lp);
  std::size_t stored_entries() const { return values_.size(); }

 private:
  std::size_t offset(std::size_t lo, std::size_t hi) const;

  std::size_t max_degree_;
  std::vector<std::size_t> pair_base_;  // by hi
  std::vector<double> values_;
};

GammaTable build_gamma_table(std::size_t max_degree);

/// Legendre coefficients of the pointwise product. Output degree deg(u)+deg(v).
LegSeries star_convolve(const LegSeries& u, const LegSeries& v, const GammaTable& table);
/// Same, but only output coefficients 0..max_out are formed.
LegSeries star_convolve_truncated(const LegSeries& u, const LegSeries& v, const GammaTable& table,
                                  std::size_t max_out);

}  // namespace nlhelm
