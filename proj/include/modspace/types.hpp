#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace modspace {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
/// Space-time storage: one column per time frame, one row per grid point
/// (or per frequency node for coefficient matrices).
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad exponent, non-finite samples, violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A band or frequency lies outside what the grid resolves.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// D^s with s < 0 applied to data with a nonzero mean coefficient.
class SingularMultiplier : public Error {
 public:
  using Error::Error;
};

/// A dilation would push mass or spectrum off the periodic grid.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The grid is too coarse for the requested construction.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Operation is not defined for the given discretisation.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the range the well-posedness results cover.
class OutOfRegime : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// An internal consistency check failed.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace modspace
