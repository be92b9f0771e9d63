// Independent reference computations shared by the unit and acceptance tests.
#ifndef GAUSSNET_TESTS_ORACLES_HPP_
#define GAUSSNET_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "gaussnet/matrix.hpp"

namespace oracle {

// Richardson-extrapolated central difference of f at x.
inline double derivative(const std::function<double(double)>& f, double x, double h = 1e-4) {
  auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

// Richardson-extrapolated 4-point mixed partial d2f/du dv; f(du, dv) evaluates
// the function with the two coordinates shifted. For u == v the caller passes
// the same coordinate twice and this reduces to a second difference.
inline double mixed_partial(const std::function<double(double, double)>& f, double h = 1e-3) {
  auto d = [&](double s) {
    return (f(s, s) - f(s, -s) - f(-s, s) + f(-s, -s)) / (4.0 * s * s);
  };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

// 2 * int_0^inf g(z) phi(z) dz for an even integrand, by exp-sinh quadrature.
inline double even_normal_expectation(const std::function<double(double)>& g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return 2.0 * integrator.integrate([&](double z) {
    if (z > 60.0) return 0.0;
    return g(z) * std::exp(-0.5 * z * z) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  });
}

// Determinant by cofactor expansion along the first row.
inline double determinant(const gaussnet::Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0);
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    gaussnet::Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, cc++) = a(i, j);
      }
    }
    det += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, c) * determinant(minor);
  }
  return det;
}

// Roots of det(A - t I) on [lo, hi], by a fine sign-change scan and bisection.
inline std::vector<double> char_poly_roots(const gaussnet::Matrix& a, double lo, double hi,
                                           std::size_t grid = 20000) {
  auto p = [&](double t) {
    gaussnet::Matrix s = a;
    for (std::size_t i = 0; i < a.rows(); ++i) s(i, i) -= t;
    return determinant(s);
  };
  std::vector<double> roots;
  double x0 = lo;
  double f0 = p(x0);
  for (std::size_t k = 1; k <= grid; ++k) {
    const double x1 = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid);
    const double f1 = p(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      double a0 = x0;
      double b0 = x1;
      double fa = f0;
      for (int it = 0; it < 200 && b0 - a0 > 1e-15 * std::max(1.0, std::abs(b0)); ++it) {
        const double mid = 0.5 * (a0 + b0);
        const double fm = p(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
          a0 = mid;
          fa = fm;
        } else {
          b0 = mid;
        }
      }
      roots.push_back(0.5 * (a0 + b0));
    }
    x0 = x1;
    f0 = f1;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

} // namespace oracle

#endif // GAUSSNET_TESTS_ORACLES_HPP_
