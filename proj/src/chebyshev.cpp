#include "nlhelm/chebyshev.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "nlhelm/errors.hpp"
#include "nlhelm/kernels.hpp"
#include "nlhelm/special.hpp"

namespace nlhelm {

ChebPoly::ChebPoly(std::vector<double> a, Interval interval) : a_(std::move(a)), interval_(interval) {
  if (a_.empty()) throw DomainError("ChebPoly: need at least one coefficient");
  if (!(interval_.beta > interval_.alpha)) throw DomainError("ChebPoly: degenerate interval");
}

ChebPoly ChebPoly::padded_pow2() const {
  std::vector<double> a = a_;
  a.resize(std::bit_ceil(a.size()), 0.0);
  return ChebPoly(std::move(a), interval_);
}

namespace {

template <typename T>
T clenshaw_sum(const std::vector<double>& a, T x) {
  T b1{}, b2{};
  for (std::size_t k = a.size(); k-- > 1;) {
    const T b0 = a[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return a[0] + x * b1 - b2;
}

}  // namespace

double cheb_eval(const ChebPoly& p, double s) {
  const auto& iv = p.interval();
  if (!iv.contains(s)) throw IntensityOutOfRange(s, iv.alpha, iv.beta);
  return clenshaw_sum(p.coeffs(), iv.to_unit(s));
}

cdouble cheb_eval(const ChebPoly& p, cdouble s) {
  return clenshaw_sum(p.coeffs(), p.interval().to_unit(s));
}

void cheb_eval_many(const ChebPoly& p, std::span<const double> s, std::span<double> out) {
  const auto& iv = p.interval();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!iv.contains(s[i])) throw IntensityOutOfRange(s[i], iv.alpha, iv.beta);
    out[i] = iv.to_unit(s[i]);
  }
  kernels::clenshaw(p.coeffs(), out, out);
}

ChebPoly cheb_fit(const std::function<double(double)>& f, Interval interval, std::size_t k) {
  if (k == 0) throw DomainError("cheb_fit: K must be >= 1");
  if (!(interval.beta > interval.alpha)) throw DomainError("cheb_fit: degenerate interval");
  const double kd = static_cast<double>(k);
  std::vector<double> fx(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double x = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / kd);
    const double s = 0.5 * (interval.alpha + interval.beta) + 0.5 * interval.width() * x;
    fx[j] = f(s);
    if (!std::isfinite(fx[j])) {
      throw DomainError("cheb_fit: non-finite function value at s=" + std::to_string(s));
    }
  }
  std::vector<double> a(k, 0.0);
  for (std::size_t n = 0; n < k; ++n) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sum += fx[j] * std::cos(std::numbers::pi * static_cast<double>(n) *
                              (static_cast<double>(j) + 0.5) / kd);
    }
    a[n] = (n == 0 ? 1.0 : 2.0) * sum / kd;
  }
  return ChebPoly(std::move(a), interval);
}

ChebPoly sin_reference_coeffs(Interval interval, std::size_t n_terms) {
  if (n_terms == 0) throw DomainError("sin_reference_coeffs: need at least one term");
  const double gamma = 0.5 * (interval.alpha + interval.beta);
  const double z = 0.5 * interval.width();
  const auto J = bessel_J(n_terms - 1, z);
  std::vector<double> a(n_terms);
  for (std::size_t n = 0; n < n_terms; ++n) {
    // sin(gamma + n pi/2) by n mod 4 keeps the zeros exact.
    double phase = 0.0;
    switch (n % 4) {
      case 0: phase = std::sin(gamma); break;
      case 1: phase = std::cos(gamma); break;
      case 2: phase = -std::sin(gamma); break;
      default: phase = -std::cos(gamma); break;
    }
    a[n] = phase * (n == 0 ? J[0] : 2.0 * J[n]);
  }
  return ChebPoly(std::move(a), interval);
}

LegSeries normalize_intensity(const LegSeries& d, Interval interval) {
  if (!(interval.beta > interval.alpha)) throw DomainError("normalize_intensity: beta <= alpha");
  LegSeries out = d;
  const double w = interval.width();
  out[0] = (2.0 * d[0] - interval.alpha - interval.beta) / w;
  for (std::size_t l = 1; l < out.size(); ++l) out[l] = 2.0 * d[l] / w;
  return out;
}

namespace {

LegSeries constant_series(double c) { return LegSeries({cdouble{c, 0.0}}); }

void check_table(const ChebPoly& p, const LegSeries& f, const GammaTable& table, const char* who) {
  const std::size_t final_degree = (p.size() - 1) * f.degree();
  if (final_degree > table.max_degree()) {
    throw TableTooSmall(std::string(who) + ": composition degree " + std::to_string(final_degree) +
                        " exceeds table max_degree " + std::to_string(table.max_degree()));
  }
}

}  // namespace

LegSeries compose_clenshaw(const ChebPoly& p, const LegSeries& f, const GammaTable& table,
                           CompositionStats* stats) {
  check_table(p, f, table, "compose_clenshaw");
  const auto& a = p.coeffs();
  if (a.size() == 1) return constant_series(a[0]);
  const LegSeries g = normalize_intensity(f, p.interval());
  // b_{K-1} = a_{K-1}, b_K = 0; keeps every b_k at degree (K-1-k) deg(g).
  LegSeries b1 = constant_series(a.back());
  LegSeries b2 = constant_series(0.0);
  std::size_t conv = 0;
  for (std::size_t k = a.size() - 1; k-- > 1;) {
    LegSeries b0 = 2.0 * star_convolve(g, b1, table);
    ++conv;
    b0 -= b2;
    b0[0] += a[k];
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  LegSeries out = star_convolve(g, b1, table);
  ++conv;
  out -= b2;
  out[0] += a[0];
  if (stats) stats->convolutions += conv;
  return out;
}

namespace {

struct DyadicComposer {
  const GammaTable& table;
  // ladder[j] = T_{2^j}(g)
  std::vector<LegSeries> ladder;
  CompositionStats stats;

  LegSeries rec(std::span<const double> a) {
    if (a.size() == 1) return constant_series(a[0]);
    if (a.size() == 2) {
      LegSeries out = cdouble{a[1], 0.0} * ladder[0];
      out[0] += a[0];
      return out;
    }
    const std::size_t m = a.size() / 2;
    std::vector<double> q(m), r(m);
    q[0] = a[0];
    for (std::size_t k = 1; k < m; ++k) q[k] = a[k] - a[2 * m - k];
    r[0] = 0.5 * a[m];
    for (std::size_t j = 1; j < m; ++j) r[j] = a[m + j];
    const std::size_t level = static_cast<std::size_t>(std::countr_zero(m));
    LegSeries out = rec(q);
    out += 2.0 * star_convolve(ladder[level], rec(r), table);
    ++stats.convolutions;
    return out;
  }
};

}  // namespace

LegSeries compose_dyadic(const ChebPoly& p, const LegSeries& f, const GammaTable& table,
                         CompositionStats* stats) {
  const ChebPoly padded = p.padded_pow2();
  const std::size_t size = padded.size();
  check_table(padded, f, table, "compose_dyadic");
  if (size == 1) return constant_series(padded.coeffs()[0]);
  DyadicComposer c{table, {}, {}};
  c.ladder.push_back(normalize_intensity(f, p.interval()));
  const std::size_t depth = static_cast<std::size_t>(std::countr_zero(size));
  for (std::size_t j = 1; j < depth; ++j) {
    LegSeries next = 2.0 * star_convolve(c.ladder.back(), c.ladder.back(), table);
    next[0] -= 1.0;
    c.ladder.push_back(std::move(next));
    ++c.stats.ladder_convolutions;
  }
  LegSeries out = c.rec(padded.coeffs());
  if (stats) {
    stats->convolutions += c.stats.convolutions;
    stats->ladder_convolutions += c.stats.ladder_convolutions;
  }
  return out;
}

std::vector<LegSeries> chebyshev_ladder(const LegSeries& g, std::size_t count,
                                        const GammaTable& table) {
  std::vector<LegSeries> t;
  t.reserve(count);
  if (count == 0) return t;
  t.push_back(constant_series(1.0));
  if (count == 1) return t;
  t.push_back(g);
  for (std::size_t k = 2; k < count; ++k) {
    LegSeries next = 2.0 * star_convolve(g, t[k - 1], table);
    next -= t[k - 2];
    t.push_back(std::move(next));
  }
  return t;
}

double composition_range_check(const LegSeries& f, Interval interval) {
  double worst = 0.0;
  constexpr int kSamples = 256;
  for (int i = 0; i < kSamples; ++i) {
    const double t = -1.0 + 2.0 * i / (kSamples - 1);
    worst = std::max(worst, std::abs(interval.to_unit(synthesize(f, t))));
  }
  return worst;
}

}  // namespace nlhelm
