#include "nlhelm/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlhelm/errors.hpp"

namespace nlhelm {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// error weights: 5th order minus embedded 4th order
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kAlpha = 0.7 / 5.0;
constexpr double kBeta = 0.4 / 5.0;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

double component_ratio(double err, double y, double ynew, double atol, double rtol) {
  return std::abs(err) / (atol + rtol * std::max(std::abs(y), std::abs(ynew)));
}

}  // namespace

OdeStats integrate_dopri5(const OdeRhs& rhs, double r0, double r1, std::vector<cdouble> y0,
                          const OdeOptions& opts, const OdeObserver& observe) {
  const std::size_t n = y0.size();
  const double span = r1 - r0;
  if (!(span > 0.0)) throw SolverError("integrate_dopri5: need r1 > r0");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw SolverError("integrate_dopri5: tolerances must be positive");

  const double h_min = 1e-12 * span;
  const double h_max = opts.max_step > 0.0 ? opts.max_step : span;
  double h = std::min(opts.initial_step > 0.0 ? opts.initial_step : span / 100.0, h_max);

  std::vector<cdouble> y = std::move(y0), ynew(n), ytmp(n);
  std::vector<cdouble> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  OdeStats stats;
  double r = r0;
  rhs(r, y, k1);
  ++stats.rhs_evals;
  observe(r, y);

  double err_prev = 1e-4;
  bool rejected_last = false;

  while (r < r1) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      std::ostringstream msg;
      msg << "integrate_dopri5: exceeded " << opts.max_steps << " steps at r=" << r;
      throw SolverError(msg.str());
    }
    bool last = false;
    if (r + h >= r1) {
      h = r1 - r;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
    rhs(r + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(r + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(r + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs(r + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    const double r_next = last ? r1 : r + h;
    rhs(r_next, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    rhs(r_next, ynew, k7);
    stats.rhs_evals += 6;

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const cdouble e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      if (!std::isfinite(ynew[i].real()) || !std::isfinite(ynew[i].imag())) finite = false;
      err = std::max(err, component_ratio(e.real(), y[i].real(), ynew[i].real(), opts.atol, opts.rtol));
      err = std::max(err, component_ratio(e.imag(), y[i].imag(), ynew[i].imag(), opts.atol, opts.rtol));
    }
    if (!finite || !std::isfinite(err)) {
      std::ostringstream msg;
      msg << "integrate_dopri5: non-finite state at r=" << r << " (h=" << h << ")";
      throw SolverError(msg.str());
    }

    if (err <= 1.0) {
      double factor = err == 0.0 ? kMaxFactor
                                 : kSafety * std::pow(err, -kAlpha) * std::pow(err_prev, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      if (rejected_last) factor = std::min(factor, 1.0);
      err_prev = std::max(err, 1e-4);
      r = r_next;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      observe(r, y);
      rejected_last = false;
      h = std::min(h * factor, h_max);
    } else {
      const double factor = std::max(kMinFactor, kSafety * std::pow(err, -0.2));
      h *= factor;
      ++stats.rejected;
      rejected_last = true;
      if (h < h_min) {
        std::ostringstream msg;
        msg << "integrate_dopri5: step size underflow at r=" << r << " (h=" << h
            << ", error ratio " << err << ")";
        throw SolverError(msg.str());
      }
    }
  }
  return stats;
}

}  // namespace nlhelm
