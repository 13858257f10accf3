#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace tnload {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix4 = Eigen::Matrix4cd;
using RealVector = Eigen::VectorXd;

/// Largest site/qubit count for which dense 2^N vectors are materialized.
inline constexpr int kDefaultDenseCap = 20;

/// Base class of every error thrown by the library. The CLI maps each
/// subclass onto its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes: bad PGM header, unparsable CSV/JSON, version mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a precondition (shape, range, cap).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a failed decomposition.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace tnload
