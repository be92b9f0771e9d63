#ifndef GAUSSNET_BOUNDS_HPP_
#define GAUSSNET_BOUNDS_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "gaussnet/errors.hpp"
#include "gaussnet/gauss_moments.hpp"
#include "gaussnet/model.hpp"
#include "gaussnet/spectra.hpp"

namespace gaussnet {

namespace detail {

inline void check_width(std::size_t n) {
  if (n == 0) throw ConfigError("width must be >= 1");
}

inline double checked_variance(double sigma_sq) {
  if (!(sigma_sq > 0.0)) {
    throw DomainError("output variance sigma^2 is zero; the bound is undefined");
  }
  return sigma_sq;
}

inline BoundReport finish(BoundReport rep, std::size_t n) {
  rep.width = n;
  rep.constant = rep.breakdown.product();
  rep.value = rep.constant / std::sqrt(static_cast<double>(n));
  return rep;
}

} // namespace detail

/// The unit network: d = 1, x = 1, sigma_w = 1, no biases.
inline NetworkConfig unit_network(std::size_t n) {
  NetworkConfig cfg;
  cfg.width = n;
  return cfg;
}

/// c_M sqrt(3(1 + sqrt 2)) ||a + b|Z|^gamma||_{L4}^2 / sqrt(n), for the unit network.
inline BoundReport bound_theorem_1(std::size_t n, const ActivationSpec& act, Metric metric) {
  detail::check_width(n);
  validate_activation(act);
  const double sigma_sq = detail::checked_variance(network_variance(unit_network(n), act));
  const double env = envelope_l4(act, 1.0);
  BoundReport rep;
  rep.metric = metric;
  rep.sigma_sq = sigma_sq;
  rep.breakdown.metric_constant = metric_constant(metric, sigma_sq);
  rep.breakdown.geometry_term = std::sqrt(3.0 * (1.0 + std::numbers::sqrt2));
  rep.breakdown.envelope_term = env * env;
  rep.theorem = "single-unit";
  return detail::finish(rep, n);
}

/// Gamma-dependent radical of the single-input bound, including sigma_w^2:
/// sigma_w^2 sqrt(G^2 + G^4 (2 + sqrt(3 (1 + 2 G^2 + 3 G^4)))).
inline double single_input_geometry(double sigma_w, double gamma) {
  const double g2 = gamma * gamma;
  const double g4 = g2 * g2;
  return sigma_w * sigma_w *
         std::sqrt(g2 + g4 * (2.0 + std::sqrt(3.0 * (1.0 + 2.0 * g2 + 3.0 * g4))));
}

/// c_M sigma_w^2 sqrt(G^2 + G^4 (2 + sqrt(3(1 + 2G^2 + 3G^4)))) ||a + b|G Z|^gamma||_{L4}^2
/// / sqrt(n), G = Gamma.
inline BoundReport bound_theorem_2(const NetworkConfig& cfg, const ActivationSpec& act,
                                   Metric metric) {
  validate_config(cfg, act);
  if (cfg.input_count() != 1) throw DomainError("bound_theorem_2 needs exactly one input");
  const double sigma_sq = detail::checked_variance(network_variance(cfg, act));
  const double gamma = std::sqrt(gamma_sq(cfg, 0));
  const double env = envelope_l4(act, gamma);
  BoundReport rep;
  rep.metric = metric;
  rep.sigma_sq = sigma_sq;
  rep.breakdown.metric_constant = metric_constant(metric, sigma_sq);
  rep.breakdown.geometry_term = single_input_geometry(cfg.sigma_w, gamma);
  rep.breakdown.envelope_term = env * env;
  rep.theorem = "single-input";
  return detail::finish(rep, cfg.width);
}

/// K~^2 = sum_{i,k} (G_i^2 + sqrt(3(1 + 2G_i^2 + 3G_i^4)) G_ik^2 + 2 G_i^2 G_ik)
///        ||a + b|G_i Z|^gamma||_{L4}^2 ||a + b|G_k Z|^gamma||_{L4}^2.
inline double k_tilde(const CovarianceMatrix& cov, const ActivationSpec& act) {
  const std::size_t p = cov.size();
  std::vector<double> env2(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double e = envelope_l4(act, cov.gamma[i]);
    env2[i] = e * e;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double g2 = cov.gamma[i] * cov.gamma[i];
    const double rad = std::sqrt(3.0 * (1.0 + 2.0 * g2 + 3.0 * g2 * g2));
    for (std::size_t k = 0; k < p; ++k) {
      const double gik = cov.gamma_cross(i, k);
      acc += (g2 + rad * gik * gik + 2.0 * g2 * gik) * env2[i] * env2[k];
    }
  }
  return std::sqrt(acc);
}

/// 2 sigma_w^2 K~ (lambda_1(C) / lambda_p(C)) sqrt(p / n). W1 only.
inline BoundReport bound_theorem_3(const NetworkConfig& cfg, const ActivationSpec& act,
                                   Metric metric = Metric::W1) {
  if (metric != Metric::W1) {
    throw UnsupportedMetricError("the multi-input bound is only available for W1, not " +
                                 std::string(to_string(metric)));
  }
  validate_config(cfg, act);
  const CovarianceMatrix cov = covariance_matrix(cfg, act);
  const SpectrumSummary spec = require_nonsingular(symmetric_eigenvalues(cov.entries));
  const double p = static_cast<double>(cfg.input_count());
  BoundReport rep;
  rep.metric = metric;
  rep.sigma_sq = cov.entries.trace() / p;
  rep.spectrum = std::pair{spec.lambda_max, spec.lambda_min};
  rep.breakdown.metric_constant = 2.0;
  rep.breakdown.geometry_term = cfg.sigma_w * cfg.sigma_w * std::sqrt(p);
  rep.breakdown.envelope_term = 1.0;
  rep.breakdown.k_tilde = k_tilde(cov, act);
  rep.breakdown.spectrum_ratio = spec.condition;
  rep.theorem = "multi-input";
  return detail::finish(rep, cfg.width);
}

/// True on the slice where the single-input bound reduces to the unit one.
inline bool is_unit_slice(const NetworkConfig& cfg) {
  return cfg.input_dim == 1 && cfg.input_count() == 1 && cfg.inputs[0][0] == 1.0 &&
         cfg.sigma_w == 1.0 && cfg.sigma_b == 0.0;
}

/// Unit-network bound on the unit slice, else the single-input bound.
inline BoundReport single_output_bound(const NetworkConfig& cfg, const ActivationSpec& act,
                                       Metric metric) {
  return is_unit_slice(cfg) ? bound_theorem_1(cfg.width, act, metric)
                            : bound_theorem_2(cfg, act, metric);
}

struct GrowthPoint {
  double m = 0.0;
  ActivationSpec activation;
  BoundReport report;
};

/// Unit-network bound for the ReLU approximant of each sharpness m, using the
/// family's analytic envelope. The bound grows without limit as m increases.
inline std::vector<GrowthPoint> relu_growth(ActivationKind family, const std::vector<double>& ms,
                                            std::size_t n, Metric metric) {
  if (family != ActivationKind::softplus_approx && family != ActivationKind::sau_approx) {
    throw ConfigError("relu_growth needs softplus-approx or sau-approx");
  }
  std::vector<GrowthPoint> out;
  out.reserve(ms.size());
  for (double m : ms) {
    GrowthPoint pt;
    pt.m = m;
    pt.activation = ActivationSpec::canonical(family, m);
    pt.report = bound_theorem_1(n, pt.activation, metric);
    out.push_back(std::move(pt));
  }
  return out;
}

} // namespace gaussnet

#endif // GAUSSNET_BOUNDS_HPP_
