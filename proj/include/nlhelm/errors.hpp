#pragma once

#include <stdexcept>
#include <string>

namespace nlhelm {

/// Argument outside the mathematical domain of an operation (|t| > 1, x <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed configuration or input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GammaTable smaller than the degrees an operation needs.
class TableTooSmall : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Integrator or least-squares failure.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Chebyshev nonlinearity was asked for F(s) with s outside [alpha, beta].
class IntensityOutOfRange : public DomainError {
 public:
  IntensityOutOfRange(double value, double alpha, double beta);
  double value() const { return value_; }

 private:
  double value_;
};

}  // namespace nlhelm
