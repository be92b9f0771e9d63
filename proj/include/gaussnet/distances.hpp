#ifndef GAUSSNET_DISTANCES_HPP_
#define GAUSSNET_DISTANCES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "gaussnet/errors.hpp"
#include "gaussnet/model.hpp"

namespace gaussnet {

enum class DistanceMethod { ecdf_vs_cdf, sorted_coupling, binned_histogram };

inline std::string_view to_string(DistanceMethod m) {
  switch (m) {
  case DistanceMethod::ecdf_vs_cdf: return "ecdf-vs-cdf";
  case DistanceMethod::sorted_coupling: return "sorted-coupling";
  case DistanceMethod::binned_histogram: return "binned-histogram";
  }
  return "?";
}

struct DistanceEstimate {
  Metric metric = Metric::KS;
  double value = 0.0;
  std::size_t sample_size = 0;
  DistanceMethod method = DistanceMethod::ecdf_vs_cdf;
  std::optional<std::size_t> bin_count;
};

/// Standard normal CDF and quantile.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double normal_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Phi^{-1}((i - 0.5) / m) for i = 1..m.
inline std::vector<double> plugin_quantiles(std::size_t m) {
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) {
    q[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));
  }
  return q;
}

namespace detail {

inline void check_sample(std::span<const double> sample, double sigma_sq) {
  if (sample.empty()) throw DomainError("sample must be nonempty");
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw DomainError("reference variance must be > 0");
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!std::isfinite(sample[i])) {
      throw DomainError("non-finite sample entry at index " + std::to_string(i));
    }
  }
}

inline std::vector<double> sorted_copy(std::span<const double> sample) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Type-7 sample quantile of sorted data.
inline double sorted_quantile(const std::vector<double>& s, double p) {
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

} // namespace detail

// The *_sorted variants take an ascending sample and skip validation; the
// harness sorts once and evaluates every metric on the same buffer.

inline double ks_sorted(const std::vector<double>& s, double sigma, double mean = 0.0) {
  const double m = static_cast<double>(s.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf((s[i] - mean) / sigma);
    const double up = static_cast<double>(i + 1) / m - f;
    const double down = f - static_cast<double>(i) / m;
    worst = std::max({worst, up, down});
  }
  return worst;
}

inline double w1_sorted(const std::vector<double>& s, double sigma,
                        const std::vector<double>& std_quantiles) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += std::abs(s[i] - sigma * std_quantiles[i]);
  return acc / static_cast<double>(s.size());
}

struct BinnedTv {
  double value = 0.0;
  std::size_t bins = 0;
};

inline BinnedTv tv_sorted(const std::vector<double>& s, double sigma) {
  const std::size_t m = s.size();
  const double iqr = detail::sorted_quantile(s, 0.75) - detail::sorted_quantile(s, 0.25);
  double lo = 0.0;
  double width = 0.0;
  std::size_t bins = 0;
  if (iqr > 0.0) {
    width = 2.0 * iqr / std::cbrt(static_cast<double>(m));
    lo = s.front() - width;
    const double span = s.back() + width - lo;
    bins = static_cast<std::size_t>(std::ceil(span / width));
  } else {
    bins = 64;
    lo = -6.0 * sigma;
    width = 12.0 * sigma / static_cast<double>(bins);
  }
  const double hi = lo + width * static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  std::size_t outside = 0;
  for (double x : s) {
    if (x < lo || x >= hi) {
      ++outside;
      continue;
    }
    auto k = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(k, bins - 1)] += 1;
  }
  const double mm = static_cast<double>(m);
  double acc = 0.0;
  double covered = 0.0;
  double prev = normal_cdf(lo / sigma);
  for (std::size_t k = 0; k < bins; ++k) {
    const double next = normal_cdf((lo + width * static_cast<double>(k + 1)) / sigma);
    const double q = next - prev;
    covered += q;
    acc += std::abs(static_cast<double>(counts[k]) / mm - q);
    prev = next;
  }
  const double mass_out = std::max(0.0, 1.0 - covered);
  acc += std::abs(static_cast<double>(outside) / mm - mass_out);
  return {0.5 * acc, bins};
}

/// Exact one-sample KS statistic against N(mean, sigma_sq).
inline DistanceEstimate ks_to_gaussian(std::span<const double> sample, double sigma_sq,
                                       double mean = 0.0) {
  detail::check_sample(sample, sigma_sq);
  const auto s = detail::sorted_copy(sample);
  return {Metric::KS, ks_sorted(s, std::sqrt(sigma_sq), mean), s.size(),
          DistanceMethod::ecdf_vs_cdf, std::nullopt};
}

/// (1/m) sum_i |x_(i) - sigma Phi^{-1}((i - 0.5)/m)|.
inline DistanceEstimate w1_to_gaussian(std::span<const double> sample, double sigma_sq) {
  detail::check_sample(sample, sigma_sq);
  const auto s = detail::sorted_copy(sample);
  return {Metric::W1, w1_sorted(s, std::sqrt(sigma_sq), plugin_quantiles(s.size())), s.size(),
          DistanceMethod::sorted_coupling, std::nullopt};
}

/// Binned TV: Freedman-Diaconis bins over [min - h, max + h]; the Gaussian
/// mass outside the binned range counts as unmatched. Falls back to 64 bins
/// over +-6 sigma when the interquartile range is zero.
inline DistanceEstimate tv_to_gaussian(std::span<const double> sample, double sigma_sq) {
  detail::check_sample(sample, sigma_sq);
  if (sample.size() < 100) throw DomainError("tv_to_gaussian needs at least 100 points");
  const auto s = detail::sorted_copy(sample);
  const auto tv = tv_sorted(s, std::sqrt(sigma_sq));
  return {Metric::TV, tv.value, s.size(), DistanceMethod::binned_histogram, tv.bins};
}

inline DistanceEstimate distance_to_gaussian(Metric metric, std::span<const double> sample,
                                             double sigma_sq) {
  switch (metric) {
  case Metric::KS: return ks_to_gaussian(sample, sigma_sq);
  case Metric::W1: return w1_to_gaussian(sample, sigma_sq);
  case Metric::TV: return tv_to_gaussian(sample, sigma_sq);
  }
  throw DomainError("unknown metric");
}

/// (1/m) sum |a_(i) - b_(i)| over equal-size sorted samples.
inline DistanceEstimate two_sample_w1(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("two_sample_w1 needs equal sample sizes (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DomainError("samples must be nonempty");
  const auto sa = detail::sorted_copy(a);
  const auto sb = detail::sorted_copy(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) acc += std::abs(sa[i] - sb[i]);
  return {Metric::W1, acc / static_cast<double>(sa.size()), sa.size(),
          DistanceMethod::sorted_coupling, std::nullopt};
}

} // namespace gaussnet

#endif // GAUSSNET_DISTANCES_HPP_
