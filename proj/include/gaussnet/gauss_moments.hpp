#ifndef GAUSSNET_GAUSS_MOMENTS_HPP_
#define GAUSSNET_GAUSS_MOMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "gaussnet/activation.hpp"
#include "gaussnet/errors.hpp"
#include "gaussnet/matrix.hpp"
#include "gaussnet/model.hpp"
#include "gaussnet/quadrature.hpp"

namespace gaussnet {

inline constexpr std::size_t kMinimumQuadratureOrder = 20;

/// E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi), evaluated in log space.
inline double abs_moment(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("abs_moment needs p >= 0");
  if (p == 0.0) return 1.0;
  return std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) -
                  0.5 * std::log(std::numbers::pi));
}

/// || a + b |scale Z|^gamma ||_{L4}, by binomial expansion of the fourth power.
inline double envelope_l4(double a, double b, double gamma, double scale) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(gamma >= 0.0)) {
    throw DomainError("envelope_l4 needs a, b, gamma >= 0");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("envelope_l4 needs scale > 0");
  constexpr double binom[5] = {1.0, 4.0, 6.0, 4.0, 1.0};
  double acc = 0.0;
  for (int k = 0; k <= 4; ++k) {
    const double kg = k * gamma;
    const double term = binom[k] * std::pow(a, 4 - k) * std::pow(b, k) * std::pow(scale, kg) *
                        abs_moment(kg);
    acc += term;
  }
  return std::pow(acc, 0.25);
}

inline double envelope_l4(const ActivationSpec& act, double scale) {
  return envelope_l4(act.envelope_a, act.envelope_b, act.envelope_gamma, scale);
}

namespace detail {

inline void check_rule(const QuadratureRule& rule) {
  if (rule.order < kMinimumQuadratureOrder) {
    throw DomainError("quadrature order " + std::to_string(rule.order) +
                      " is below the accuracy floor of " +
                      std::to_string(kMinimumQuadratureOrder));
  }
}

// E[tau^2(gamma Z)] on a fixed rule.
inline double mean_square(const ActivationSpec& act, double gamma, const QuadratureRule& rule) {
  return dispatch(act, [&](const auto& tau) {
    return rule.expect([&](double z) {
      const double v = tau.value(gamma * z);
      return v * v;
    });
  });
}

// E[tau(Y_i) tau(Y_k)] for (Y_i, Y_k) centred normal with standard deviations
// gi, gk and correlation rho.
inline double cross_moment(const ActivationSpec& act, double gi, double gk, double rho,
                           const QuadratureRule& rule) {
  return dispatch(act, [&](const auto& tau) {
    if (std::abs(rho) > 1.0 - 1e-12) {
      const double sgn = rho > 0.0 ? 1.0 : -1.0;
      return rule.expect([&](double z) { return tau.value(gi * z) * tau.value(sgn * gk * z); });
    }
    // (Y_i, Y_k) = (gi Z1, gk (rho Z1 + sqrt(1 - rho^2) Z2)).
    const std::size_t q = rule.nodes.size();
    const double tail = std::sqrt(1.0 - rho * rho);
    double acc = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      const double z1 = rule.normal_node(a);
      const double ti = tau.value(gi * z1);
      double inner = 0.0;
      for (std::size_t b = 0; b < q; ++b) {
        inner += rule.normal_weight(b) * tau.value(gk * (rho * z1 + tail * rule.normal_node(b)));
      }
      acc += rule.normal_weight(a) * ti * inner;
    }
    return acc;
  });
}

} // namespace detail

/// sigma^2 = sigma_w^2 E[tau^2(Gamma_i Z)] + sigma_b^2 for input i, on a fixed rule.
inline double network_variance(const NetworkConfig& cfg, const ActivationSpec& act,
                               const QuadratureRule& rule, std::size_t input = 0) {
  detail::check_rule(rule);
  if (input >= cfg.input_count()) throw DomainError("input index out of range");
  const double gamma = std::sqrt(gamma_sq(cfg, input));
  return cfg.sigma_w * cfg.sigma_w * detail::mean_square(act, gamma, rule) +
         cfg.sigma_b * cfg.sigma_b;
}

/// Same, with order escalation from 200 until two successive orders agree to 1e-8.
inline Converged<double> network_variance_converged(const NetworkConfig& cfg,
                                                    const ActivationSpec& act,
                                                    std::size_t input = 0) {
  return converge_in_order(
      [&](const QuadratureRule& rule) { return network_variance(cfg, act, rule, input); },
      [](double a, double b) { return std::abs(a - b) <= kQuadratureTolerance * std::abs(b); });
}

inline double network_variance(const NetworkConfig& cfg, const ActivationSpec& act,
                               std::size_t input = 0) {
  auto res = network_variance_converged(cfg, act, input);
  if (!res.converged) {
    throw NumericalError("network variance did not converge up to quadrature order " +
                         std::to_string(res.order));
  }
  return res.value;
}

/// Output covariance of the p-input network.
struct CovarianceMatrix {
  Matrix entries;
  std::vector<double> gamma; // Gamma_i
  Matrix gamma_cross;        // Gamma_ik
  std::size_t order = 0;     // quadrature order used

  [[nodiscard]] std::size_t size() const { return entries.rows(); }
};

/// c_ik = sigma_w^2 E[tau(Y_i) tau(Y_k)] + sigma_b^2 with
/// Cov(Y_i, Y_k) = sigma_w^2 <x_i, x_k> + sigma_b^2, on a fixed rule.
inline CovarianceMatrix covariance_matrix(const NetworkConfig& cfg, const ActivationSpec& act,
                                          const QuadratureRule& rule) {
  detail::check_rule(rule);
  const std::size_t p = cfg.input_count();
  if (p == 0) throw DomainError("covariance_matrix needs at least one input");
  CovarianceMatrix out;
  out.entries = Matrix(p, p);
  out.gamma_cross = Matrix(p, p);
  out.gamma.resize(p);
  out.order = rule.order;
  for (std::size_t i = 0; i < p; ++i) out.gamma[i] = std::sqrt(gamma_sq(cfg, i));
  const double sw2 = cfg.sigma_w * cfg.sigma_w;
  const double sb2 = cfg.sigma_b * cfg.sigma_b;
  for (std::size_t i = 0; i < p; ++i) {
    out.entries(i, i) = network_variance(cfg, act, rule, i);
    out.gamma_cross(i, i) = gamma_cross(cfg, i, i);
    for (std::size_t k = i + 1; k < p; ++k) {
      const double rho =
          std::clamp(preactivation_covariance(cfg, i, k) / (out.gamma[i] * out.gamma[k]), -1.0,
                     1.0);
      const double c =
          sw2 * detail::cross_moment(act, out.gamma[i], out.gamma[k], rho, rule) + sb2;
      out.entries(i, k) = out.entries(k, i) = c;
      out.gamma_cross(i, k) = out.gamma_cross(k, i) = gamma_cross(cfg, i, k);
    }
  }
  return out;
}

/// Same, escalating the order until every entry agrees to 1e-8 relative to
/// the largest entry.
inline CovarianceMatrix covariance_matrix(const NetworkConfig& cfg, const ActivationSpec& act) {
  auto res = converge_in_order(
      [&](const QuadratureRule& rule) { return covariance_matrix(cfg, act, rule); },
      [](const CovarianceMatrix& a, const CovarianceMatrix& b) {
        double scale = 0.0;
        double diff = 0.0;
        for (std::size_t k = 0; k < b.entries.data().size(); ++k) {
          scale = std::max(scale, std::abs(b.entries.data()[k]));
          diff = std::max(diff, std::abs(a.entries.data()[k] - b.entries.data()[k]));
        }
        return diff <= kQuadratureTolerance * scale;
      });
  if (!res.converged) {
    throw NumericalError("covariance matrix did not converge up to quadrature order " +
                         std::to_string(res.order));
  }
  return res.value;
}

} // namespace gaussnet

#endif // GAUSSNET_GAUSS_MOMENTS_HPP_
