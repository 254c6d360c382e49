#include "nlhelm/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlhelm/errors.hpp"

namespace nlhelm {

IntensityOutOfRange::IntensityOutOfRange(double value, double alpha, double beta)
    : DomainError("intensity " + std::to_string(value) + " outside Chebyshev interval [" +
                  std::to_string(alpha) + ", " + std::to_string(beta) + "]"),
      value_(value) {}

// ---------------------------------------------------------------------------
// LegSeries

LegSeries::LegSeries(std::vector<cdouble> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.emplace_back(0.0, 0.0);
}

LegSeries::LegSeries(std::initializer_list<cdouble> coeffs) : LegSeries(std::vector<cdouble>(coeffs)) {}

LegSeries LegSeries::from_real(std::span<const double> coeffs) {
  return LegSeries(std::vector<cdouble>(coeffs.begin(), coeffs.end()));
}

LegSeries LegSeries::conj() const {
  std::vector<cdouble> c(coeffs_.size());
  std::transform(coeffs_.begin(), coeffs_.end(), c.begin(), [](cdouble z) { return std::conj(z); });
  return LegSeries(std::move(c));
}

LegSeries LegSeries::truncated(std::size_t degree) const {
  std::vector<cdouble> c(degree + 1);
  std::copy_n(coeffs_.begin(), std::min(c.size(), coeffs_.size()), c.begin());
  return LegSeries(std::move(c));
}

double LegSeries::l1_norm() const {
  double s = 0.0;
  for (auto z : coeffs_) s += std::abs(z);
  return s;
}

LegSeries& LegSeries::operator+=(const LegSeries& o) {
  if (o.size() > size()) coeffs_.resize(o.size());
  for (std::size_t i = 0; i < o.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

LegSeries& LegSeries::operator-=(const LegSeries& o) {
  if (o.size() > size()) coeffs_.resize(o.size());
  for (std::size_t i = 0; i < o.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

LegSeries& LegSeries::operator*=(cdouble s) {
  for (auto& z : coeffs_) z *= s;
  return *this;
}

LegSeries operator+(LegSeries a, const LegSeries& b) { return a += b; }
LegSeries operator-(LegSeries a, const LegSeries& b) { return a -= b; }
LegSeries operator*(cdouble s, LegSeries a) { return a *= s; }

// ---------------------------------------------------------------------------
// Evaluation and quadrature

void legendre_eval_into(double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  for (std::size_t l = 1; l + 1 < out.size(); ++l) {
    const double ld = static_cast<double>(l);
    out[l + 1] = ((2.0 * ld + 1.0) * t * out[l] - ld * out[l - 1]) / (ld + 1.0);
  }
}

std::vector<double> legendre_eval_all(std::size_t lmax, double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("legendre_eval_all: |t| > 1");
  std::vector<double> p(lmax + 1);
  legendre_eval_into(t, p);
  return p;
}

namespace {

// P_n(x) and P_n'(x).
std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t l = 1; l < n; ++l) {
    const double ld = static_cast<double>(l);
    const double p2 = ((2.0 * ld + 1.0) * x * p1 - ld * p0) / (ld + 1.0);
    p0 = p1;
    p1 = p2;
  }
  const double nd = static_cast<double>(n);
  const double dp = nd * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t q) {
  if (q == 0) throw DomainError("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.assign(q, 0.0);
  rule.weights.assign(q, 0.0);
  const double qd = static_cast<double>(q);
  const std::size_t half = (q + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Largest roots first; mirrored into the lower half below.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (qd + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre_with_derivative(q, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw SolverError("gauss_legendre: Newton iteration did not converge for Q=" + std::to_string(q));
    }
    dp = legendre_with_derivative(q, x).second;
    if (q % 2 == 1 && i == half - 1) x = 0.0;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  return rule;
}

LegSeries project(std::span<const cdouble> samples, const QuadratureRule& rule, std::size_t n) {
  if (n + 1 > rule.size()) {
    throw DomainError("project: degree " + std::to_string(n) + " needs at least " +
                      std::to_string(n + 1) + " quadrature nodes");
  }
  if (samples.size() != rule.size()) throw DomainError("project: samples not aligned with rule");
  std::vector<cdouble> c(n + 1);
  std::vector<double> p(n + 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    legendre_eval_into(rule.nodes[q], p);
    const cdouble wg = rule.weights[q] * samples[q];
    for (std::size_t l = 0; l <= n; ++l) c[l] += wg * p[l];
  }
  for (std::size_t l = 0; l <= n; ++l) c[l] *= (2.0 * static_cast<double>(l) + 1.0) / 2.0;
  return LegSeries(std::move(c));
}

cdouble synthesize(const LegSeries& s, double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("synthesize: |t| > 1");
  // Clenshaw for Legendre: b_l = c_l + alpha_l b_{l+1} + beta_{l+1} b_{l+2}
  const auto& c = s.coeffs();
  cdouble b1{}, b2{};
  for (std::size_t l = c.size(); l-- > 1;) {
    const double ld = static_cast<double>(l);
    const double alpha = (2.0 * ld + 1.0) / (ld + 1.0) * t;
    const double beta = -(ld + 1.0) / (ld + 2.0);
    const cdouble b0 = c[l] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - 0.5 * b2;
}

std::vector<double> legendre_matrix(const QuadratureRule& rule, std::size_t n) {
  std::vector<double> m(rule.size() * (n + 1));
  for (std::size_t q = 0; q < rule.size(); ++q) {
    legendre_eval_into(rule.nodes[q], std::span<double>(m).subspan(q * (n + 1), n + 1));
  }
  return m;
}

std::vector<double> projection_matrix(const QuadratureRule& rule, std::size_t n,
                                      bool expansion_normalized) {
  const std::size_t nq = rule.size();
  std::vector<double> m((n + 1) * nq);
  std::vector<double> p(n + 1);
  for (std::size_t q = 0; q < nq; ++q) {
    legendre_eval_into(rule.nodes[q], p);
    for (std::size_t l = 0; l <= n; ++l) {
      const double scale = expansion_normalized ? (2.0 * static_cast<double>(l) + 1.0) / 2.0 : 1.0;
      m[l * nq + q] = scale * rule.weights[q] * p[l];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Gamma coefficients
//
// For l + l' + L = 2s even and triangle-valid,
//   int P_l P_l' P_L = 2/(2s+1) * A(s-l) A(s-l') A(s-L) / A(s),
//   A(m) = (2m-1)!! / m!  (so A(m) ~ 1/sqrt(pi m) stays O(1)).
// A is built by the product recurrence A(m) = A(m-1) (2m-1)/(2m) instead of
// log-gamma differences; it cannot overflow and loses only ~m ulps.

namespace {

std::vector<double> a_table(std::size_t m_max) {
  std::vector<double> a(m_max + 1);
  a[0] = 1.0;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double md = static_cast<double>(m);
    a[m] = a[m - 1] * (2.0 * md - 1.0) / (2.0 * md);
  }
  return a;
}

bool in_support(std::size_t L, std::size_t l, std::size_t lp) {
  const std::size_t lo = l > lp ? l - lp : lp - l;
  return L >= lo && L <= l + lp && (L + l + lp) % 2 == 0;
}

double gamma_from_a(const std::vector<double>& a, std::size_t L, std::size_t l, std::size_t lp) {
  const std::size_t s = (L + l + lp) / 2;
  return (2.0 * static_cast<double>(L) + 1.0) / (2.0 * static_cast<double>(s) + 1.0) * a[s - l] *
         a[s - lp] * a[s - L] / a[s];
}

}  // namespace

double gamma_coefficient(std::size_t L, std::size_t l, std::size_t lp) {
  if (!in_support(L, l, lp)) return 0.0;
  return gamma_from_a(a_table((L + l + lp) / 2), L, l, lp);
}

GammaTable::GammaTable(std::size_t max_degree) : max_degree_(max_degree) {
  pair_base_.resize(max_degree + 2);
  pair_base_[0] = 0;
  for (std::size_t hi = 0; hi <= max_degree; ++hi) {
    // pairs (lo, hi), lo = 0..hi, each holding lo+1 values
    pair_base_[hi + 1] = pair_base_[hi] + (hi + 1) * (hi + 2) / 2;
  }
  values_.assign(pair_base_[max_degree + 1], 0.0);
}

std::size_t GammaTable::offset(std::size_t lo, std::size_t hi) const {
  return pair_base_[hi] + lo * (lo + 1) / 2;
}

std::span<const double> GammaTable::block(std::size_t l, std::size_t lp) const {
  const std::size_t lo = std::min(l, lp);
  const std::size_t hi = std::max(l, lp);
  return {values_.data() + offset(lo, hi), lo + 1};
}

std::span<double> GammaTable::mutable_block(std::size_t l, std::size_t lp) {
  const std::size_t lo = std::min(l, lp);
  const std::size_t hi = std::max(l, lp);
  return {values_.data() + offset(lo, hi), lo + 1};
}

double GammaTable::operator()(std::size_t L, std::size_t l, std::size_t lp) const {
  if (l > max_degree_ || lp > max_degree_) {
    throw TableTooSmall("GammaTable: degree " + std::to_string(std::max(l, lp)) + " exceeds " +
                        std::to_string(max_degree_));
  }
  if (!in_support(L, l, lp)) return 0.0;
  const std::size_t lo = std::min(l, lp);
  const std::size_t hi = std::max(l, lp);
  return values_[offset(lo, hi) + (L - (hi - lo)) / 2];
}

GammaTable build_gamma_table(std::size_t max_degree) {
  GammaTable table(max_degree);
  const auto a = a_table(2 * max_degree + 1);
  for (std::size_t hi = 0; hi <= max_degree; ++hi) {
    for (std::size_t lo = 0; lo <= hi; ++lo) {
      auto blk = table.mutable_block(lo, hi);
      for (std::size_t j = 0; j <= lo; ++j) blk[j] = gamma_from_a(a, hi - lo + 2 * j, lo, hi);
    }
  }
  return table;
}

namespace {

void convolve_into(const LegSeries& u, const LegSeries& v, const GammaTable& table,
                   std::vector<cdouble>& out) {
  const std::size_t max_out = out.size() - 1;
  const auto& uc = u.coeffs();
  const auto& vc = v.coeffs();
  for (std::size_t l = 0; l < uc.size(); ++l) {
    if (uc[l] == cdouble{}) continue;
    for (std::size_t lp = 0; lp < vc.size(); ++lp) {
      const std::size_t lo = l > lp ? l - lp : lp - l;
      if (lo > max_out) continue;
      const cdouble prod = uc[l] * vc[lp];
      if (prod == cdouble{}) continue;
      const auto blk = table.block(l, lp);
      const std::size_t top = std::min(l + lp, max_out);
      for (std::size_t L = lo, j = 0; L <= top; L += 2, ++j) out[L] += blk[j] * prod;
    }
  }
}

}  // namespace

LegSeries star_convolve(const LegSeries& u, const LegSeries& v, const GammaTable& table) {
  const std::size_t deg = u.degree() + v.degree();
  if (deg > table.max_degree()) {
    throw TableTooSmall("star_convolve: product degree " + std::to_string(deg) +
                        " exceeds table max_degree " + std::to_string(table.max_degree()));
  }
  std::vector<cdouble> out(deg + 1);
  convolve_into(u, v, table, out);
  return LegSeries(std::move(out));
}

LegSeries star_convolve_truncated(const LegSeries& u, const LegSeries& v, const GammaTable& table,
                                  std::size_t max_out) {
  // Pairs with |l - l'| > max_out never contribute.
  const std::size_t need = std::max(std::min(u.degree(), max_out + v.degree()),
                                    std::min(v.degree(), max_out + u.degree()));
  if (need > table.max_degree()) {
    throw TableTooSmall("star_convolve_truncated: needs degree " + std::to_string(need) +
                        ", table has " + std::to_string(table.max_degree()));
  }
  const LegSeries uu = u.truncated(std::min(u.degree(), max_out + v.degree()));
  const LegSeries vv = v.truncated(std::min(v.degree(), max_out + u.degree()));
  std::vector<cdouble> out(std::min(max_out, u.degree() + v.degree()) + 1);
  convolve_into(uu, vv, table, out);
  return LegSeries(std::move(out));
}

}  // namespace nlhelm
