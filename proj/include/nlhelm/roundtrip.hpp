#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nlhelm/chebyshev.hpp"
#include "nlhelm/forward.hpp"
#include "nlhelm/inverse.hpp"

namespace nlhelm {

/// Forward-then-invert check with a random Chebyshev nonlinearity.
struct RoundtripConfig {
  ForwardConfig forward;    // its nonlinearity is replaced by the random ChebPoly
  InverseConfig inverse;    // K, rings, ridge; interval and intensity are filled in
  std::size_t K = 4;
  double coefficient_bound = 0.5;
  std::uint64_t seed = 1;
  std::size_t bounds_grid = 64;  // t-grid size handed to estimate_bounds
  std::size_t max_attempts = 8;  // forward solves before giving up on the interval
};

/// Defaults used when no configuration is supplied: modulus intensity with an
/// amplitude-modulated plane wave, so |U|^2 varies in t on every ring.
RoundtripConfig default_roundtrip_config();

struct RoundtripResult {
  ChebPoly truth;
  InverseResult inverse;
  std::vector<double> ring_errors;  // max_k |a_k - a_true_k| per ring
  double median_error = 0.0;
  double max_error = 0.0;
  std::size_t attempts = 0;
  Trajectory trajectory;
};

/// Draws a_true uniformly in [-bound, bound]^K, takes the interval from
/// estimate_bounds on a linear pilot solve, and widens it (retrying the
/// forward solve) whenever the nonlinear solve leaves it.
RoundtripResult run_roundtrip(const RoundtripConfig& cfg);

double median(std::vector<double> values);

}  // namespace nlhelm
