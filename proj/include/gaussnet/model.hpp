#ifndef GAUSSNET_MODEL_HPP_
#define GAUSSNET_MODEL_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaussnet/errors.hpp"

namespace gaussnet {

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class ActivationKind {
  tanh,
  cubic,
  identity,
  softplus_approx, // G(m, x) = log(1 + exp(m x)) / m
  sau_approx,      // smooth ReLU built from a Gaussian kernel and erf
  custom,
};

inline std::string_view to_string(ActivationKind kind) {
  switch (kind) {
  case ActivationKind::tanh: return "tanh";
  case ActivationKind::cubic: return "cubic";
  case ActivationKind::identity: return "identity";
  case ActivationKind::softplus_approx: return "softplus-approx";
  case ActivationKind::sau_approx: return "sau-approx";
  case ActivationKind::custom: return "custom";
  }
  return "unknown";
}

inline ActivationKind parse_activation_kind(std::string_view name) {
  if (name == "tanh") return ActivationKind::tanh;
  if (name == "cubic") return ActivationKind::cubic;
  if (name == "identity") return ActivationKind::identity;
  if (name == "softplus-approx" || name == "softplus") return ActivationKind::softplus_approx;
  if (name == "sau-approx" || name == "sau") return ActivationKind::sau_approx;
  if (name == "custom") return ActivationKind::custom;
  throw ConfigError("unknown activation kind '" + std::string(name) + "'");
}

/// User-supplied tau, tau', tau'' for a custom activation.
struct CustomActivation {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// An activation together with a polynomial envelope a + b|x|^gamma that
/// dominates |tau|, |tau'| and |tau''|.
struct ActivationSpec {
  ActivationKind kind = ActivationKind::tanh;
  double envelope_a = 1.0;
  double envelope_b = 0.0;
  double envelope_gamma = 0.0;
  /// Sharpness of the ReLU approximants; unused by the other families.
  double m = 1.0;
  std::shared_ptr<const CustomActivation> callbacks;

  static ActivationSpec make(ActivationKind kind, double a, double b, double gamma,
                             double m = 1.0) {
    ActivationSpec spec;
    spec.kind = kind;
    spec.envelope_a = a;
    spec.envelope_b = b;
    spec.envelope_gamma = gamma;
    spec.m = m;
    return spec;
  }

  static ActivationSpec tanh() { return make(ActivationKind::tanh, 1.0, 0.0, 0.0); }
  static ActivationSpec cubic() { return make(ActivationKind::cubic, 6.0, 1.0, 3.0); }
  // tau' = 1 everywhere, so the constant part of the envelope must be 1.
  static ActivationSpec identity() { return make(ActivationKind::identity, 1.0, 1.0, 1.0); }

  // |G| <= log(2)/m + |x|, |G'| <= 1, |G''| <= m/4.
  static ActivationSpec softplus(double m) {
    return make(ActivationKind::softplus_approx, std::max(1.0, m / 4.0), 1.0, 1.0, m);
  }

  // |H| <= 1/(m sqrt(2 pi)) + |x|, |H'| <= 1, |H''| <= m/sqrt(2 pi).
  static ActivationSpec sau(double m) {
    const double peak = m * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    return make(ActivationKind::sau_approx, std::max(1.0, peak), 1.0, 1.0, m);
  }

  static ActivationSpec custom(CustomActivation fns, double a, double b, double gamma) {
    ActivationSpec spec = make(ActivationKind::custom, a, b, gamma);
    spec.callbacks = std::make_shared<const CustomActivation>(std::move(fns));
    return spec;
  }

  /// Canonical spec for a family, with the family's default envelope.
  static ActivationSpec canonical(ActivationKind kind, double m = 1.0) {
    switch (kind) {
    case ActivationKind::tanh: return tanh();
    case ActivationKind::cubic: return cubic();
    case ActivationKind::identity: return identity();
    case ActivationKind::softplus_approx: return softplus(m);
    case ActivationKind::sau_approx: return sau(m);
    case ActivationKind::custom:
      throw ConfigError("custom activations have no canonical envelope");
    }
    throw ConfigError("unknown activation kind");
  }

  [[nodiscard]] ActivationSpec with_envelope(double a, double b, double gamma) const {
    ActivationSpec copy = *this;
    copy.envelope_a = a;
    copy.envelope_b = b;
    copy.envelope_gamma = gamma;
    return copy;
  }

  /// a + b|x|^gamma, with 0^0 = 1.
  [[nodiscard]] double envelope(double x) const {
    return envelope_a + envelope_b * std::pow(std::abs(x), envelope_gamma);
  }

  [[nodiscard]] bool uses_sharpness() const {
    return kind == ActivationKind::softplus_approx || kind == ActivationKind::sau_approx;
  }
};

inline void validate_activation(const ActivationSpec& act) {
  auto check_nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("envelope parameter ") + name +
                        " must be finite and >= 0");
    }
  };
  check_nonneg(act.envelope_a, "a");
  check_nonneg(act.envelope_b, "b");
  check_nonneg(act.envelope_gamma, "gamma");
  if (act.uses_sharpness() && !(act.m >= 1.0 && std::isfinite(act.m))) {
    throw ConfigError("ReLU approximant sharpness m must be finite and >= 1");
  }
  if (act.kind == ActivationKind::custom) {
    if (!act.callbacks || !act.callbacks->value || !act.callbacks->d1 || !act.callbacks->d2) {
      throw ConfigError("custom activation must supply tau, tau' and tau'' callbacks");
    }
  }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// Hyperparameters of the shallow Gaussian network
///   F(x) = sigma_w / sqrt(n) * sum_j w_j tau(sigma_w <w0_j, x> + sigma_b b0_j) + sigma_b b
/// with every weight i.i.d. N(0, 1). The number of inputs p is inputs.size().
struct NetworkConfig {
  std::size_t input_dim = 1;
  std::size_t width = 1;
  double sigma_w = 1.0;
  double sigma_b = 0.0;
  std::vector<std::vector<double>> inputs{{1.0}};

  [[nodiscard]] std::size_t input_count() const { return inputs.size(); }

  [[nodiscard]] NetworkConfig with_width(std::size_t n) const {
    NetworkConfig copy = *this;
    copy.width = n;
    return copy;
  }

  [[nodiscard]] NetworkConfig single(std::size_t i) const {
    NetworkConfig copy = *this;
    copy.inputs = {inputs.at(i)};
    return copy;
  }
};

/// Gamma_i^2 = sigma_w^2 ||x_i||^2 + sigma_b^2.
inline double gamma_sq(const NetworkConfig& cfg, std::size_t i) {
  double norm_sq = 0.0;
  for (double v : cfg.inputs[i]) norm_sq += v * v;
  return cfg.sigma_w * cfg.sigma_w * norm_sq + cfg.sigma_b * cfg.sigma_b;
}

/// Gamma_ik = sigma_w^2 sum_j |x_ij x_kj| + sigma_b^2.
inline double gamma_cross(const NetworkConfig& cfg, std::size_t i, std::size_t k) {
  double acc = 0.0;
  for (std::size_t j = 0; j < cfg.input_dim; ++j) {
    acc += std::abs(cfg.inputs[i][j] * cfg.inputs[k][j]);
  }
  return cfg.sigma_w * cfg.sigma_w * acc + cfg.sigma_b * cfg.sigma_b;
}

/// Cov(Y_i, Y_k) = sigma_w^2 <x_i, x_k> + sigma_b^2 for the pre-activations.
inline double preactivation_covariance(const NetworkConfig& cfg, std::size_t i, std::size_t k) {
  double dot = 0.0;
  for (std::size_t j = 0; j < cfg.input_dim; ++j) dot += cfg.inputs[i][j] * cfg.inputs[k][j];
  return cfg.sigma_w * cfg.sigma_w * dot + cfg.sigma_b * cfg.sigma_b;
}

/// Checks every NetworkConfig and ActivationSpec invariant and returns the
/// configuration unchanged. Throws ConfigError naming the violated invariant.
inline NetworkConfig validate_config(const NetworkConfig& cfg, const ActivationSpec& act) {
  validate_activation(act);
  if (cfg.width == 0) throw ConfigError("width must be >= 1");
  if (cfg.input_dim == 0) throw ConfigError("input_dim must be >= 1");
  if (!(cfg.sigma_w > 0.0) || !std::isfinite(cfg.sigma_w)) {
    throw ConfigError("sigma_w must be finite and > 0");
  }
  if (!(cfg.sigma_b >= 0.0) || !std::isfinite(cfg.sigma_b)) {
    throw ConfigError("sigma_b must be finite and >= 0");
  }
  if (cfg.inputs.empty()) throw ConfigError("at least one input vector is required");
  for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
    const auto& x = cfg.inputs[i];
    if (x.size() != cfg.input_dim) {
      throw ConfigError("dimension mismatch: input " + std::to_string(i) + " has length " +
                        std::to_string(x.size()) + ", expected input_dim = " +
                        std::to_string(cfg.input_dim));
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw ConfigError("input " + std::to_string(i) + " is not finite");
    }
    if (!(gamma_sq(cfg, i) > 0.0)) {
      throw ConfigError("degenerate input " + std::to_string(i) +
                        ": Gamma^2 = sigma_w^2 ||x||^2 + sigma_b^2 is zero");
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Metrics and bound reports
// ---------------------------------------------------------------------------

enum class Metric { W1, TV, KS };

inline std::string_view to_string(Metric m) {
  switch (m) {
  case Metric::W1: return "W1";
  case Metric::TV: return "TV";
  case Metric::KS: return "KS";
  }
  return "?";
}

inline Metric parse_metric(std::string_view name) {
  std::string up(name);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "W1") return Metric::W1;
  if (up == "TV") return Metric::TV;
  if (up == "KS") return Metric::KS;
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected KS, TV or W1)");
}

/// c_TV = 4/s2, c_KS = 2/s2, c_W1 = sqrt(8/(s2 pi)).
inline double metric_constant(Metric m, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw DomainError("metric constant needs sigma^2 > 0");
  switch (m) {
  case Metric::TV: return 4.0 / sigma_sq;
  case Metric::KS: return 2.0 / sigma_sq;
  case Metric::W1: return std::sqrt(8.0 / (sigma_sq * std::numbers::pi));
  }
  throw DomainError("unknown metric");
}

/// Factors of a closed-form bound. Their product over sqrt(width) is the bound.
struct BoundBreakdown {
  double metric_constant = 0.0;
  double envelope_term = 1.0; // squared L4 norm of the envelope
  double geometry_term = 1.0; // Gamma-dependent radical (times sigma_w^2, sqrt(p))
  std::optional<double> k_tilde;
  std::optional<double> spectrum_ratio;

  [[nodiscard]] double product() const {
    return metric_constant * geometry_term * envelope_term * k_tilde.value_or(1.0) *
           spectrum_ratio.value_or(1.0);
  }
};

struct BoundReport {
  Metric metric = Metric::W1;
  std::size_t width = 1;
  double value = 0.0;
  /// Output variance; for the multi-input report, the mean diagonal of C.
  double sigma_sq = 0.0;
  /// n-free factor: value * sqrt(width).
  double constant = 0.0;
  /// (lambda_1(C), lambda_p(C)), present only for multi-input reports.
  std::optional<std::pair<double, double>> spectrum;
  BoundBreakdown breakdown;
  std::string theorem; // "single-unit", "single-input" or "multi-input"
};

} // namespace gaussnet

#endif // GAUSSNET_MODEL_HPP_
