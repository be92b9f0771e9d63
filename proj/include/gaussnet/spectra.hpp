#ifndef GAUSSNET_SPECTRA_HPP_
#define GAUSSNET_SPECTRA_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gaussnet/errors.hpp"
#include "gaussnet/matrix.hpp"

namespace gaussnet {

struct SpectrumSummary {
  std::vector<double> eigenvalues; // descending
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  /// lambda_max / lambda_min; +inf when lambda_min <= 0.
  double condition = 0.0;
  /// lambda_min <= 1e-12 lambda_max.
  bool singular = false;

  /// ||C||_2 and ||C^{-1}||_2 for an SPD matrix.
  [[nodiscard]] double spectral_norm() const { return lambda_max; }
  [[nodiscard]] double inverse_spectral_norm() const { return 1.0 / lambda_min; }
};

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kSingularityRatio = 1e-12;

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations, swept
/// until the off-diagonal Frobenius mass drops below 1e-14 ||C||_F.
inline SpectrumSummary symmetric_eigenvalues(const Matrix& c) {
  if (c.rows() != c.cols() || c.rows() == 0) {
    throw DomainError("symmetric_eigenvalues needs a nonempty square matrix");
  }
  const std::size_t n = c.rows();
  double scale = 0.0;
  for (double v : c.data()) {
    if (!std::isfinite(v)) throw DomainError("matrix has non-finite entries");
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(c(i, j) - c(j, i)) > kSymmetryTolerance * scale) {
        throw DomainError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
    }
  }

  Matrix a = c;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (c(i, j) + c(j, i));
  }
  const double target = 1e-14 * a.frobenius_norm();
  auto off_mass = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
  };

  constexpr int max_sweeps = 100;
  int sweep = 0;
  while (off_mass() > target) {
    if (++sweep > max_sweeps) throw NumericalError("Jacobi sweeps did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the classic tan(2 theta) formula, taking the
        // smaller root for stability.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }

  SpectrumSummary out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
  out.lambda_max = out.eigenvalues.front();
  out.lambda_min = out.eigenvalues.back();
  out.condition = out.lambda_min > 0.0 ? out.lambda_max / out.lambda_min
                                       : std::numeric_limits<double>::infinity();
  out.singular = !(out.lambda_min > kSingularityRatio * out.lambda_max);
  return out;
}

/// Throws SingularCovarianceError if the spectrum is flagged singular.
inline const SpectrumSummary& require_nonsingular(const SpectrumSummary& s) {
  if (s.singular) {
    throw SingularCovarianceError("covariance matrix is numerically singular (lambda_min = " +
                                  std::to_string(s.lambda_min) + ", lambda_max = " +
                                  std::to_string(s.lambda_max) + ")");
  }
  return s;
}

} // namespace gaussnet

#endif // GAUSSNET_SPECTRA_HPP_
