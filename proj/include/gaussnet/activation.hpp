#ifndef GAUSSNET_ACTIVATION_HPP_
#define GAUSSNET_ACTIVATION_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "gaussnet/errors.hpp"
#include "gaussnet/model.hpp"

namespace gaussnet {

namespace activation {

struct Tanh {
  double value(double x) const { return std::tanh(x); }
  double d1(double x) const {
    const double s = 1.0 / std::cosh(x);
    return s * s;
  }
  double d2(double x) const {
    const double s = 1.0 / std::cosh(x);
    return -2.0 * std::tanh(x) * s * s;
  }
};

struct Cubic {
  double value(double x) const { return x * x * x; }
  double d1(double x) const { return 3.0 * x * x; }
  double d2(double x) const { return 6.0 * x; }
};

struct Identity {
  double value(double x) const { return x; }
  double d1(double) const { return 1.0; }
  double d2(double) const { return 0.0; }
};

/// G(m, x) = log(1 + exp(m x)) / m, evaluated without overflow.
struct Softplus {
  double m;
  double value(double x) const {
    const double t = m * x;
    const double lse = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    return lse / m;
  }
  double d1(double x) const {
    const double t = m * x;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
  }
  // m s (1 - s) written in terms of exp(-|t|) so it stays accurate in both tails.
  double d2(double x) const {
    const double e = std::exp(-std::abs(m * x));
    return m * e / ((1.0 + e) * (1.0 + e));
  }
};

/// H(m, x) = phi(m x)/m + x/2 + (x/2) erf(m x / sqrt 2) = phi(m x)/m + x Phi(m x).
/// H' = Phi(m x) and H'' = m phi(m x).
struct Sau {
  double m;
  static double pdf(double t) {
    return 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2 * std::exp(-0.5 * t * t);
  }
  static double cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }
  double value(double x) const {
    const double t = m * x;
    return pdf(t) / m + x * cdf(t);
  }
  double d1(double x) const { return cdf(m * x); }
  double d2(double x) const { return m * pdf(m * x); }
};

struct Custom {
  const CustomActivation* fns;
  double value(double x) const { return fns->value(x); }
  double d1(double x) const { return fns->d1(x); }
  double d2(double x) const { return fns->d2(x); }
};

} // namespace activation

/// Calls fn with a concrete activation functor (value/d1/d2 members) so hot
/// loops are compiled once per family instead of branching per call.
template <class Fn>
decltype(auto) dispatch(const ActivationSpec& act, Fn&& fn) {
  switch (act.kind) {
  case ActivationKind::tanh: return fn(activation::Tanh{});
  case ActivationKind::cubic: return fn(activation::Cubic{});
  case ActivationKind::identity: return fn(activation::Identity{});
  case ActivationKind::softplus_approx: return fn(activation::Softplus{act.m});
  case ActivationKind::sau_approx: return fn(activation::Sau{act.m});
  case ActivationKind::custom:
    if (!act.callbacks || !act.callbacks->value || !act.callbacks->d1 || !act.callbacks->d2) {
      throw ConfigError("custom activation is missing a derivative callback");
    }
    return fn(activation::Custom{act.callbacks.get()});
  }
  throw ConfigError("unknown activation kind");
}

/// tau^(order)(x) for order in {0, 1, 2}.
inline double eval(const ActivationSpec& act, int order, double x) {
  if (order < 0 || order > 2) {
    throw DomainError("activation derivative order must be 0, 1 or 2, got " +
                      std::to_string(order));
  }
  return dispatch(act, [&](const auto& tau) {
    switch (order) {
    case 0: return tau.value(x);
    case 1: return tau.d1(x);
    default: return tau.d2(x);
    }
  });
}

struct EnvelopeReport {
  bool holds = true;
  /// Largest |tau^(l)(x)| - (a + b|x|^gamma) seen on the grid.
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_x = 0.0;
  int worst_order = 0;
};

/// Checks |tau^(l)(x)| <= a + b|x|^gamma for l = 0, 1, 2 on every grid point.
inline EnvelopeReport envelope_check(const ActivationSpec& act, std::span<const double> grid) {
  if (grid.empty()) throw DomainError("envelope_check needs a nonempty grid");
  EnvelopeReport report;
  dispatch(act, [&](const auto& tau) {
    for (double x : grid) {
      const double bound = act.envelope(x);
      const double derivs[3] = {tau.value(x), tau.d1(x), tau.d2(x)};
      for (int l = 0; l < 3; ++l) {
        const double excess = std::abs(derivs[l]) - bound;
        if (excess > report.worst_excess || std::isnan(excess)) {
          report.worst_excess = excess;
          report.worst_x = x;
          report.worst_order = l;
        }
      }
    }
    return 0;
  });
  report.holds = report.worst_excess <= 0.0;
  return report;
}

} // namespace gaussnet

#endif // GAUSSNET_ACTIVATION_HPP_
