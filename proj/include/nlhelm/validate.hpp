#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace nlhelm {

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string counterexample;  // first failing case, empty when passed
};

struct ValidateOptions {
  std::uint64_t seed = 1;
  /// Test hook: perturb one stored Gamma entry before the normalization check.
  bool corrupt_gamma = false;
};

/// Sum over L of Gamma(L; l, l') equals 1 and every entry lies in [0, 1], l, l' <= max_degree.
CheckResult check_gamma_normalization(std::size_t max_degree, bool corrupt = false);
/// Closed-form Gamma against Gauss-Legendre quadrature of P_L P_l P_l' for degrees <= max_degree.
CheckResult check_gamma_quadrature(std::size_t max_degree);
/// star_convolve against pointwise products of random complex series.
CheckResult check_convolution(std::uint64_t seed, std::size_t cases);
/// compose_dyadic, compose_clenshaw and quadrature projection agree pairwise.
CheckResult check_composition(std::uint64_t seed, std::size_t cases);
/// Second-difference stencil on quadratics with exactly representable samples.
CheckResult check_stencil(std::uint64_t seed, std::size_t cases);
/// Truncated plane-wave synthesis against e^{i k R0 t}, k R0 in {1, 5}, N = k R0 + 40.
CheckResult check_plane_wave();
/// eps = 0, nu = 1 solve against (2l+1) i^l j_l(k R1).
CheckResult check_linear_case();
/// Random Chebyshev nonlinearity, forward then invert; median ring error.
CheckResult check_roundtrip(std::uint64_t seed);

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

ValidationReport run_validate(const ValidateOptions& opts);

}  // namespace nlhelm
