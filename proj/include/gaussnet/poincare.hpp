#ifndef GAUSSNET_POINCARE_HPP_
#define GAUSSNET_POINCARE_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gaussnet/activation.hpp"
#include "gaussnet/errors.hpp"
#include "gaussnet/gauss_moments.hpp"
#include "gaussnet/model.hpp"
#include "gaussnet/parallel.hpp"
#include "gaussnet/rng.hpp"
#include "gaussnet/spectra.hpp"

namespace gaussnet {

// ---------------------------------------------------------------------------
// Collapsed parameterization
//   F = sigma_w / sqrt(n) sum_j w_j tau(Gamma Y_j) + sigma_b b,
// with w_j, Y_j, b i.i.d. N(0, 1).
// ---------------------------------------------------------------------------

struct CollapsedPoint {
  std::vector<double> w;
  std::vector<double> y;
  double b = 0.0;
};

/// Nonzero Hessian entries of neuron j. The (w_j, w_j) entry is always zero.
struct NeuronHessian {
  double wy = 0.0;
  double yy = 0.0;
};

/// Gradient over (w_1..w_n, Y_1..Y_n, b) and the block-diagonal Hessian.
struct DerivativeBundle {
  std::size_t width = 0;
  std::vector<double> gradient;
  std::vector<NeuronHessian> blocks;

  [[nodiscard]] std::size_t parameter_count() const { return 2 * width + 1; }

  /// Dense Hessian entry; zero off the per-neuron blocks and on the bias row.
  [[nodiscard]] double hessian(std::size_t l, std::size_t m) const {
    if (l == 2 * width || m == 2 * width) return 0.0;
    const std::size_t jl = l % width;
    const std::size_t jm = m % width;
    if (jl != jm) return 0.0;
    const bool yl = l >= width;
    const bool ym = m >= width;
    if (!yl && !ym) return 0.0;
    if (yl && ym) return blocks[jl].yy;
    return blocks[jl].wy;
  }
};

namespace detail {

inline void check_point(const NetworkConfig& cfg, const CollapsedPoint& pt) {
  if (pt.w.size() != cfg.width || pt.y.size() != cfg.width) {
    throw DomainError("parameter point does not match the network width");
  }
}

inline double output_scale(const NetworkConfig& cfg) {
  return cfg.sigma_w / std::sqrt(static_cast<double>(cfg.width));
}

} // namespace detail

inline double forward_collapsed(const NetworkConfig& cfg, const ActivationSpec& act,
                                const CollapsedPoint& pt) {
  detail::check_point(cfg, pt);
  const double gamma = std::sqrt(gamma_sq(cfg, 0));
  double acc = 0.0;
  dispatch(act, [&](const auto& tau) {
    for (std::size_t j = 0; j < cfg.width; ++j) acc += pt.w[j] * tau.value(gamma * pt.y[j]);
    return 0;
  });
  return detail::output_scale(cfg) * acc + cfg.sigma_b * pt.b;
}

/// dF/dw_j = s tau(G Y_j), dF/dY_j = s G w_j tau'(G Y_j), dF/db = sigma_b,
/// d2F/dw_j dY_j = s G tau'(G Y_j), d2F/dY_j^2 = s G^2 w_j tau''(G Y_j),
/// with s = sigma_w / sqrt(n) and G = Gamma.
inline DerivativeBundle analytic_derivatives(const NetworkConfig& cfg, const ActivationSpec& act,
                                             const CollapsedPoint& pt) {
  detail::check_point(cfg, pt);
  const std::size_t n = cfg.width;
  const double gamma = std::sqrt(gamma_sq(cfg, 0));
  const double s = detail::output_scale(cfg);
  DerivativeBundle out;
  out.width = n;
  out.gradient.assign(2 * n + 1, 0.0);
  out.blocks.resize(n);
  dispatch(act, [&](const auto& tau) {
    for (std::size_t j = 0; j < n; ++j) {
      const double u = gamma * pt.y[j];
      const double t0 = tau.value(u);
      const double t1 = tau.d1(u);
      const double t2 = tau.d2(u);
      out.gradient[j] = s * t0;
      out.gradient[n + j] = s * gamma * pt.w[j] * t1;
      out.blocks[j].wy = s * gamma * t1;
      out.blocks[j].yy = s * gamma * gamma * pt.w[j] * t2;
    }
    return 0;
  });
  out.gradient[2 * n] = cfg.sigma_b;
  return out;
}

// ---------------------------------------------------------------------------
// Raw parameterization, per neuron (w_j, w0_{j,1..d}, b0_j), then b.
// With x~ = (sigma_w x, sigma_b) and v_j = (w0_j, b0_j), the preactivation is
// <x~, v_j>, so the b0 coordinate behaves like an extra input coordinate.
// ---------------------------------------------------------------------------

struct RawPoint {
  std::vector<double> w;  // n
  std::vector<double> w0; // n * d, row j holds w0_j
  std::vector<double> b0; // n
  double b = 0.0;
};

struct RawDerivatives {
  std::size_t width = 0;
  std::size_t block = 0; // d + 2 parameters per neuron
  std::vector<double> gradient; // n * block, then b
  std::vector<double> blocks;   // n dense block x block Hessians

  [[nodiscard]] double hessian_block(std::size_t j, std::size_t l, std::size_t m) const {
    return blocks[(j * block + l) * block + m];
  }
};

namespace detail {

inline std::vector<double> augmented_input(const NetworkConfig& cfg, std::size_t i) {
  std::vector<double> xt(cfg.input_dim + 1);
  for (std::size_t t = 0; t < cfg.input_dim; ++t) xt[t] = cfg.sigma_w * cfg.inputs[i][t];
  xt[cfg.input_dim] = cfg.sigma_b;
  return xt;
}

inline void check_point(const NetworkConfig& cfg, const RawPoint& pt) {
  if (pt.w.size() != cfg.width || pt.b0.size() != cfg.width ||
      pt.w0.size() != cfg.width * cfg.input_dim) {
    throw DomainError("raw parameter point does not match the network shape");
  }
}

} // namespace detail

inline double raw_forward(const NetworkConfig& cfg, const ActivationSpec& act, const RawPoint& pt,
                          std::size_t input = 0) {
  detail::check_point(cfg, pt);
  const auto xt = detail::augmented_input(cfg, input);
  const std::size_t d = cfg.input_dim;
  double acc = 0.0;
  dispatch(act, [&](const auto& tau) {
    for (std::size_t j = 0; j < cfg.width; ++j) {
      double y = xt[d] * pt.b0[j];
      for (std::size_t t = 0; t < d; ++t) y += xt[t] * pt.w0[j * d + t];
      acc += pt.w[j] * tau.value(y);
    }
    return 0;
  });
  return detail::output_scale(cfg) * acc + cfg.sigma_b * pt.b;
}

inline RawDerivatives raw_derivatives(const NetworkConfig& cfg, const ActivationSpec& act,
                                      const RawPoint& pt, std::size_t input = 0) {
  detail::check_point(cfg, pt);
  const auto xt = detail::augmented_input(cfg, input);
  const std::size_t d = cfg.input_dim;
  const std::size_t q = d + 2;
  const std::size_t n = cfg.width;
  const double s = detail::output_scale(cfg);
  RawDerivatives out;
  out.width = n;
  out.block = q;
  out.gradient.assign(n * q + 1, 0.0);
  out.blocks.assign(n * q * q, 0.0);
  dispatch(act, [&](const auto& tau) {
    for (std::size_t j = 0; j < n; ++j) {
      double y = xt[d] * pt.b0[j];
      for (std::size_t t = 0; t < d; ++t) y += xt[t] * pt.w0[j * d + t];
      const double t0 = tau.value(y);
      const double t1 = tau.d1(y);
      const double t2 = tau.d2(y);
      double* g = out.gradient.data() + j * q;
      double* h = out.blocks.data() + j * q * q;
      g[0] = s * t0;
      for (std::size_t a = 0; a <= d; ++a) {
        g[a + 1] = s * pt.w[j] * t1 * xt[a];
        h[a + 1] = h[(a + 1) * q] = s * t1 * xt[a];
        for (std::size_t c = 0; c <= d; ++c) {
          h[(a + 1) * q + c + 1] = s * pt.w[j] * t2 * xt[a] * xt[c];
        }
      }
    }
    return 0;
  });
  out.gradient[n * q] = cfg.sigma_b;
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimators of the second-order Poincare bounds
// ---------------------------------------------------------------------------

struct McOptions {
  std::size_t samples = 100000;
  SeedSpec seed{};
  /// Independent chunks, each on its own substream; also the jackknife groups.
  std::size_t chunks = 32;
  unsigned threads = 1;
};

struct PoincareEstimate {
  /// value = prefactor * sqrt(poincare_sum).
  BoundReport report;
  double std_error = 0.0;
  /// The double sum under the square root.
  double poincare_sum = 0.0;
  double poincare_sum_std_error = 0.0;
  /// c_M for the one-output estimate, 2 sqrt(p) lambda_1 / lambda_p otherwise.
  double prefactor = 0.0;
  std::size_t samples = 0;
};

namespace detail {

// Per-neuron terms of the single-input sum, in the order
//   E[H_wY^4], E[g_w^4], E[(H_wY^2 + H_YY^2)^2], E[g_Y^4], E[(H_wY H_YY)^2], E[(g_w g_Y)^2].
inline constexpr std::size_t kTerms = 6;

inline const char* term_name(std::size_t k) {
  static constexpr const char* names[kTerms] = {
      "E[(d2F/dw dY)^4]",          "E[(dF/dw)^4]",
      "E[<H_Y, H_Y>^2]",           "E[(dF/dY)^4]",
      "E[(d2F/dw dY d2F/dY2)^2]", "E[(dF/dw dF/dY)^2]"};
  return names[k];
}

inline std::vector<std::size_t> chunk_sizes(std::size_t samples, std::size_t chunks) {
  if (samples == 0) throw DomainError("Monte-Carlo sample count must be >= 1");
  chunks = std::max<std::size_t>(1, std::min(chunks, samples));
  std::vector<std::size_t> sizes(chunks, samples / chunks);
  for (std::size_t c = 0; c < samples % chunks; ++c) ++sizes[c];
  return sizes;
}

// Delete-one-group jackknife standard error of theta(total - group_c).
template <class Theta>
double jackknife(std::size_t groups, Theta&& theta_without) {
  if (groups < 2) return 0.0;
  std::vector<double> th(groups);
  double mean = 0.0;
  for (std::size_t c = 0; c < groups; ++c) {
    th[c] = theta_without(c);
    mean += th[c];
  }
  mean /= static_cast<double>(groups);
  double ss = 0.0;
  for (double t : th) ss += (t - mean) * (t - mean);
  const double g = static_cast<double>(groups);
  return std::sqrt((g - 1.0) / g * ss);
}

inline void draw_collapsed(NormalStream& normal, CollapsedPoint& pt) {
  for (std::size_t j = 0; j < pt.w.size(); ++j) {
    pt.w[j] = normal();
    pt.y[j] = normal();
  }
  pt.b = normal();
}

// Sum over neurons of sqrt(A) sqrt(B) over the three block pairs, from
// per-neuron sums divided by `count`.
inline double single_sum(const std::vector<double>& sums, std::size_t width, double count) {
  double total = 0.0;
  for (std::size_t j = 0; j < width; ++j) {
    const double* e = sums.data() + j * kTerms;
    for (std::size_t k = 0; k < kTerms; ++k) {
      if (!std::isfinite(e[k])) {
        throw NumericalError(std::string("non-finite Monte-Carlo estimate of ") + term_name(k) +
                             " at neuron " + std::to_string(j));
      }
    }
    total += std::sqrt(e[0] / count) * std::sqrt(e[1] / count) +
             std::sqrt(e[2] / count) * std::sqrt(e[3] / count) +
             2.0 * std::sqrt(e[4] / count) * std::sqrt(e[5] / count);
  }
  return total;
}

} // namespace detail

/// Estimate of c_M sqrt(sum_{l,m} E[<H_l, H_m>^2]^{1/2} E[(g_l g_m)^2]^{1/2}) for the
/// single-input network. Only the per-neuron (w_j, Y_j) blocks contribute, so
/// each draw costs O(n). Expectations are estimated separately for every
/// neuron and combined under the square roots afterwards.
inline PoincareEstimate poincare_bound_mc(const NetworkConfig& cfg, const ActivationSpec& act,
                                          Metric metric, const McOptions& opt = {}) {
  validate_config(cfg, act);
  if (cfg.input_count() != 1) throw DomainError("poincare_bound_mc needs a single input");
  const std::size_t n = cfg.width;
  const auto sizes = detail::chunk_sizes(opt.samples, opt.chunks);
  const std::size_t groups = sizes.size();
  std::vector<std::vector<double>> chunk_sums(groups);

  parallel_for(groups, opt.threads, [&](std::size_t c) {
    auto& sums = chunk_sums[c];
    sums.assign(n * detail::kTerms, 0.0);
    NormalStream normal(opt.seed.substream(c));
    CollapsedPoint pt{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t r = 0; r < sizes[c]; ++r) {
      detail::draw_collapsed(normal, pt);
      const auto bundle = analytic_derivatives(cfg, act, pt);
      for (std::size_t j = 0; j < n; ++j) {
        const double gw = bundle.gradient[j];
        const double gy = bundle.gradient[n + j];
        const double hwy = bundle.blocks[j].wy;
        const double hyy = bundle.blocks[j].yy;
        const double ayy = hwy * hwy + hyy * hyy;
        const double awy = hwy * hyy;
        double* e = sums.data() + j * detail::kTerms;
        e[0] += (hwy * hwy) * (hwy * hwy);
        e[1] += (gw * gw) * (gw * gw);
        e[2] += ayy * ayy;
        e[3] += (gy * gy) * (gy * gy);
        e[4] += awy * awy;
        e[5] += (gw * gy) * (gw * gy);
      }
    }
  });

  std::vector<double> total(n * detail::kTerms, 0.0);
  for (const auto& s : chunk_sums)
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += s[k];
  const double count = static_cast<double>(opt.samples);

  const double sigma_sq = network_variance(cfg, act);
  const double cm = metric_constant(metric, sigma_sq);
  PoincareEstimate est;
  est.samples = opt.samples;
  est.prefactor = cm;
  est.poincare_sum = detail::single_sum(total, n, count);
  est.poincare_sum_std_error = detail::jackknife(groups, [&](std::size_t c) {
    std::vector<double> loo = total;
    for (std::size_t k = 0; k < loo.size(); ++k) loo[k] -= chunk_sums[c][k];
    return detail::single_sum(loo, n, count - static_cast<double>(sizes[c]));
  });
  est.std_error = detail::jackknife(groups, [&](std::size_t c) {
    std::vector<double> loo = total;
    for (std::size_t k = 0; k < loo.size(); ++k) loo[k] -= chunk_sums[c][k];
    return cm * std::sqrt(detail::single_sum(loo, n, count - static_cast<double>(sizes[c])));
  });

  BoundReport& rep = est.report;
  rep.metric = metric;
  rep.width = n;
  rep.sigma_sq = sigma_sq;
  rep.value = cm * std::sqrt(est.poincare_sum);
  rep.constant = rep.value * std::sqrt(static_cast<double>(n));
  rep.breakdown.metric_constant = cm;
  rep.breakdown.envelope_term = 1.0;
  rep.breakdown.geometry_term = std::sqrt(est.poincare_sum);
  rep.theorem = "single-output-poincare-mc";
  return est;
}

/// The same estimator without the sparsity reduction: every draw builds the
/// full (2n+1)-dimensional gradient and Hessian and accumulates all (l, m)
/// pairs. O(n^2) per draw for the products, so only for tiny widths; kept as
/// a reference for the reduced estimator. Returns the double sum.
inline double poincare_sum_dense(const NetworkConfig& cfg, const ActivationSpec& act,
                                 const McOptions& opt = {}) {
  validate_config(cfg, act);
  if (cfg.input_count() != 1) throw DomainError("poincare_sum_dense needs a single input");
  const std::size_t n = cfg.width;
  const std::size_t dim = 2 * n + 1;
  const auto sizes = detail::chunk_sizes(opt.samples, opt.chunks);
  std::vector<double> sum_a(dim * dim, 0.0);
  std::vector<double> sum_b(dim * dim, 0.0);
  std::vector<double> h(dim * dim);
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    std::vector<double> ca(dim * dim, 0.0);
    std::vector<double> cb(dim * dim, 0.0);
    NormalStream normal(opt.seed.substream(c));
    CollapsedPoint pt{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t r = 0; r < sizes[c]; ++r) {
      detail::draw_collapsed(normal, pt);
      const auto bundle = analytic_derivatives(cfg, act, pt);
      for (std::size_t l = 0; l < dim; ++l)
        for (std::size_t m = 0; m < dim; ++m) h[l * dim + m] = bundle.hessian(l, m);
      for (std::size_t l = 0; l < dim; ++l) {
        for (std::size_t m = 0; m < dim; ++m) {
          double inner = 0.0;
          for (std::size_t k = 0; k < dim; ++k) inner += h[l * dim + k] * h[m * dim + k];
          ca[l * dim + m] += inner * inner;
          const double gg = bundle.gradient[l] * bundle.gradient[m];
          cb[l * dim + m] += gg * gg;
        }
      }
    }
    for (std::size_t k = 0; k < dim * dim; ++k) {
      sum_a[k] += ca[k];
      sum_b[k] += cb[k];
    }
  }
  const double count = static_cast<double>(opt.samples);
  double total = 0.0;
  for (std::size_t k = 0; k < dim * dim; ++k) {
    total += std::sqrt(sum_a[k] / count) * std::sqrt(sum_b[k] / count);
  }
  return total;
}

/// Estimate of 2 sqrt(p) ||C^{-1}||_2 ||C||_2 sqrt(sum_{i,k} sum_{l,m}
/// E[<H^i_l, H^i_m>^2]^{1/2} E[(g^k_l g^k_m)^2]^{1/2}) in the raw
/// parameterization. Neurons are i.i.d., so each per-neuron expectation is
/// estimated from all (draw, neuron) pairs and the sum over neurons becomes a
/// factor n. The bias has a zero Hessian row and drops out.
inline PoincareEstimate poincare_bound_multi_mc(const NetworkConfig& cfg,
                                                const ActivationSpec& act,
                                                const McOptions& opt = {}) {
  validate_config(cfg, act);
  const std::size_t p = cfg.input_count();
  const std::size_t d = cfg.input_dim;
  const std::size_t q = d + 2;
  const std::size_t n = cfg.width;
  const CovarianceMatrix cov = covariance_matrix(cfg, act);
  const SpectrumSummary spec = require_nonsingular(symmetric_eigenvalues(cov.entries));

  std::vector<std::vector<double>> xt(p);
  for (std::size_t i = 0; i < p; ++i) xt[i] = detail::augmented_input(cfg, i);
  const double s = detail::output_scale(cfg);

  // Layout per chunk: A terms [i][l][m], then B terms [k][l][m].
  const std::size_t block = p * q * q;
  const auto sizes = detail::chunk_sizes(opt.samples, opt.chunks);
  const std::size_t groups = sizes.size();
  std::vector<std::vector<double>> chunk_sums(groups);

  parallel_for(groups, opt.threads, [&](std::size_t c) {
    auto& sums = chunk_sums[c];
    sums.assign(2 * block, 0.0);
    NormalStream normal(opt.seed.substream(c));
    std::vector<double> v(d + 1);
    std::vector<double> g(q);
    std::vector<double> h(q * q);
    dispatch(act, [&](const auto& tau) {
      for (std::size_t r = 0; r < sizes[c]; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
          const double w = normal();
          for (auto& x : v) x = normal();
          for (std::size_t i = 0; i < p; ++i) {
            double y = 0.0;
            for (std::size_t t = 0; t <= d; ++t) y += xt[i][t] * v[t];
            const double t0 = tau.value(y);
            const double t1 = tau.d1(y);
            const double t2 = tau.d2(y);
            g[0] = s * t0;
            h[0] = 0.0;
            for (std::size_t a = 0; a <= d; ++a) {
              g[a + 1] = s * w * t1 * xt[i][a];
              h[a + 1] = h[(a + 1) * q] = s * t1 * xt[i][a];
              for (std::size_t b = 0; b <= d; ++b) {
                h[(a + 1) * q + b + 1] = s * w * t2 * xt[i][a] * xt[i][b];
              }
            }
            double* ea = sums.data() + i * q * q;
            double* eb = sums.data() + block + i * q * q;
            for (std::size_t l = 0; l < q; ++l) {
              for (std::size_t m = 0; m < q; ++m) {
                double inner = 0.0;
                for (std::size_t k = 0; k < q; ++k) inner += h[l * q + k] * h[m * q + k];
                ea[l * q + m] += inner * inner;
                const double gg = g[l] * g[m];
                eb[l * q + m] += gg * gg;
              }
            }
          }
        }
        normal(); // b
      }
      return 0;
    });
  });

  std::vector<double> total(2 * block, 0.0);
  for (const auto& cs : chunk_sums)
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += cs[k];

  auto poincare_sum = [&](const std::vector<double>& sums, double draws) {
    const double count = draws * static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t l = 0; l < q; ++l) {
      for (std::size_t m = 0; m < q; ++m) {
        double sa = 0.0;
        double sb = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          const double a = sums[i * q * q + l * q + m] / count;
          const double b = sums[block + i * q * q + l * q + m] / count;
          if (!std::isfinite(a) || !std::isfinite(b)) {
            throw NumericalError("non-finite Monte-Carlo estimate for input " +
                                 std::to_string(i) + ", parameter pair (" + std::to_string(l) +
                                 ", " + std::to_string(m) + ")");
          }
          sa += std::sqrt(a);
          sb += std::sqrt(b);
        }
        acc += sa * sb;
      }
    }
    return static_cast<double>(n) * acc;
  };
  const double pref = 2.0 * std::sqrt(static_cast<double>(p)) * spec.condition;
  const double draws = static_cast<double>(opt.samples);

  PoincareEstimate est;
  est.samples = opt.samples;
  est.prefactor = pref;
  est.poincare_sum = poincare_sum(total, draws);
  auto loo_sum = [&](std::size_t c) {
    std::vector<double> loo = total;
    for (std::size_t k = 0; k < loo.size(); ++k) loo[k] -= chunk_sums[c][k];
    return poincare_sum(loo, draws - static_cast<double>(sizes[c]));
  };
  est.poincare_sum_std_error = detail::jackknife(groups, loo_sum);
  est.std_error =
      detail::jackknife(groups, [&](std::size_t c) { return pref * std::sqrt(loo_sum(c)); });

  BoundReport& rep = est.report;
  rep.metric = Metric::W1;
  rep.width = n;
  rep.sigma_sq = cov.entries.trace() / static_cast<double>(p);
  rep.value = pref * std::sqrt(est.poincare_sum);
  rep.constant = rep.value * std::sqrt(static_cast<double>(n));
  rep.spectrum = std::pair{spec.lambda_max, spec.lambda_min};
  rep.breakdown.metric_constant = 2.0;
  rep.breakdown.geometry_term = std::sqrt(static_cast<double>(p)) * std::sqrt(est.poincare_sum);
  rep.breakdown.spectrum_ratio = spec.condition;
  rep.theorem = "multi-output-poincare-mc";
  return est;
}

struct PoincareCheck {
  double variance = 0.0;
  double variance_std_error = 0.0;
  double energy = 0.0; // E[f'(N)^2]
  double energy_std_error = 0.0;
  /// variance <= energy + 3 combined standard errors.
  [[nodiscard]] bool holds() const {
    return variance <= energy + 3.0 * std::hypot(variance_std_error, energy_std_error);
  }
};

/// Monte-Carlo estimates of Var[f(N)] and E[f'(N)^2] for N ~ N(0, 1).
inline PoincareCheck gaussian_poincare_check(const std::function<double(double)>& f,
                                             const std::function<double(double)>& df,
                                             std::size_t samples, const SeedSpec& seed) {
  if (samples < 2) throw DomainError("gaussian_poincare_check needs at least 2 samples");
  NormalStream normal(seed);
  std::vector<double> values(samples);
  double energy = 0.0;
  double energy_sq = 0.0;
  double mean = 0.0;
  for (std::size_t r = 0; r < samples; ++r) {
    const double z = normal();
    values[r] = f(z);
    mean += values[r];
    const double e = df(z) * df(z);
    energy += e;
    energy_sq += e * e;
  }
  const double m = static_cast<double>(samples);
  mean /= m;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double c = (v - mean) * (v - mean);
    m2 += c;
    m4 += c * c;
  }
  m4 /= m;
  PoincareCheck out;
  out.variance = m2 / (m - 1.0);
  out.variance_std_error = std::sqrt(std::max(0.0, m4 - (m2 / m) * (m2 / m)) / m);
  out.energy = energy / m;
  out.energy_std_error = std::sqrt(std::max(0.0, energy_sq / m - out.energy * out.energy) / m);
  return out;
}

} // namespace gaussnet

#endif // GAUSSNET_POINCARE_HPP_
