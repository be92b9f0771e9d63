#ifndef GAUSSNET_ERRORS_HPP_
#define GAUSSNET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gaussnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A configuration or activation violates one of its invariants.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Bad argument to a numerical routine (wrong order, negative moment, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A computation produced a non-finite value or failed to converge.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The covariance matrix is (numerically) singular; the multi-input bound is
/// undefined there.
class SingularCovarianceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// The requested metric has no bound for this setting (multi-input KS/TV).
class UnsupportedMetricError : public Error {
public:
  using Error::Error;
};

/// File or stream failure.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace gaussnet

#endif // GAUSSNET_ERRORS_HPP_
