#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlhelm {

using cdouble = std::complex<double>;

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0: (r1 - r0) / 100
  double max_step = 0.0;      // 0: unbounded
  std::size_t max_steps = 1'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

using OdeRhs = std::function<void(double, std::span<const cdouble>, std::span<cdouble>)>;
using OdeObserver = std::function<void(double, std::span<const cdouble>)>;

/// Dormand-Prince 5(4) with FSAL and a PI step-size controller.
///
/// Real and imaginary parts are separate error components; a step is accepted
/// when max_i |err_i| / (atol + rtol max(|y_i|, |y_new_i|)) <= 1. The observer
/// sees the initial point and every accepted step; the last step is clipped so
/// the final point is exactly r1. Throws SolverError on step-size underflow
/// (below 1e-12 (r1 - r0)), non-finite state, or exceeding max_steps.
OdeStats integrate_dopri5(const OdeRhs& rhs, double r0, double r1, std::vector<cdouble> y0,
                          const OdeOptions& opts, const OdeObserver& observe);

}  // namespace nlhelm
