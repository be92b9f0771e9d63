#ifndef GAUSSNET_QUADRATURE_HPP_
#define GAUSSNET_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gaussnet/errors.hpp"

namespace gaussnet {

/// Gauss-Hermite rule for the weight exp(-t^2): nodes t_i and weights w_i with
/// sum w_i = sqrt(pi). Nodes whose weight underflows to zero are dropped, so
/// nodes.size() can be smaller than order for very large orders.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t order = 0;

  /// E[f(Z)] for Z ~ N(0, 1), via Z = sqrt(2) t.
  template <class F>
  [[nodiscard]] double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      acc += weights[i] * f(std::numbers::sqrt2 * nodes[i]);
    }
    return acc * std::numbers::inv_sqrtpi;
  }

  /// Standard-normal abscissa and probability weight of node i.
  [[nodiscard]] double normal_node(std::size_t i) const { return std::numbers::sqrt2 * nodes[i]; }
  [[nodiscard]] double normal_weight(std::size_t i) const {
    return weights[i] * std::numbers::inv_sqrtpi;
  }
};

namespace detail {

inline constexpr double kRescale = 1e150;

// Coefficients of the orthonormal Hermite recurrence
//   p_{j+1} = a_j z p_j - b_j p_{j-1},  a_j = sqrt(2/(j+1)),  b_j = sqrt(j/(j+1)).
struct HermiteRecurrence {
  std::vector<double> a;
  std::vector<double> b;

  explicit HermiteRecurrence(std::size_t n) : a(n), b(n) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dj = static_cast<double>(j);
      a[j] = std::sqrt(2.0 / (dj + 1.0));
      b[j] = std::sqrt(dj / (dj + 1.0));
    }
  }

  // (p_n(z), p_{n-1}(z)) divided by kRescale^(*rescales).
  std::pair<double, double> operator()(double z, int* rescales) const {
    constexpr double pim4 = 0.7511255444649425; // pi^(-1/4)
    double p1 = pim4;
    double p2 = 0.0;
    *rescales = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = a[j] * z * p2 - b[j] * p3;
      if (std::abs(p1) > kRescale) {
        p1 /= kRescale;
        p2 /= kRescale;
        ++*rescales;
      }
    }
    return {p1, p2};
  }
};

// Number of eigenvalues of the order-n Jacobi matrix (zero diagonal,
// off-diagonal sqrt(k/2)) below x, i.e. the number of nodes below x.
inline std::size_t nodes_below(std::size_t n, double x) {
  std::size_t count = 0;
  double d = -x;
  for (std::size_t k = 1;; ++k) {
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
    if (k == n) break;
    d = -x - (static_cast<double>(k) / 2.0) / d;
  }
  return count;
}

struct PolishedNode {
  double z = 0.0;
  double log_weight = 0.0;
  bool ok = false;
};

inline PolishedNode polish(const HermiteRecurrence& rec, double z) {
  const double scale = std::sqrt(2.0 * static_cast<double>(rec.a.size()));
  int rescales = 0;
  bool converged = false;
  for (int iter = 0; iter < 30 && !converged; ++iter) {
    const auto [p1, p2] = rec(z, &rescales);
    const double step = p1 / (scale * p2);
    z -= step;
    converged = std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z));
  }
  const auto [p1, p2] = rec(z, &rescales);
  const double pp = scale * p2;
  PolishedNode out;
  out.z = z;
  out.ok = converged && std::isfinite(z) && std::isfinite(pp) && pp != 0.0;
  out.log_weight = std::log(2.0) - 2.0 * std::log(std::abs(pp)) -
                   2.0 * static_cast<double>(rescales) * std::log(kRescale);
  (void)p1;
  return out;
}

inline QuadratureRule assemble(std::size_t n, const std::vector<PolishedNode>& positive,
                               bool has_zero, const PolishedNode& zero) {
  QuadratureRule rule;
  rule.order = n;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    const double w = std::exp(it->log_weight);
    if (w > 0.0) {
      rule.nodes.push_back(-it->z);
      rule.weights.push_back(w);
    }
  }
  if (has_zero) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(std::exp(zero.log_weight));
  }
  for (const auto& node : positive) {
    const double w = std::exp(node.log_weight);
    if (w > 0.0) {
      rule.nodes.push_back(node.z);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

// Positive nodes from the eigenvalues of the Jacobi matrix (Golub-Welsch).
// O(n^2); reliable for every order.
inline std::vector<PolishedNode> positive_nodes_from_eigenvalues(const HermiteRecurrence& rec) {
  const std::size_t n = rec.a.size();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k) {
    sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(static_cast<double>(k) / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Gauss-Hermite eigenvalue solve failed at order " + std::to_string(n));
  }
  const Eigen::VectorXd& ev = solver.eigenvalues(); // ascending
  std::vector<PolishedNode> out;
  for (std::size_t i = (n + 1) / 2; i < n; ++i) {
    const auto node = polish(rec, ev[static_cast<Eigen::Index>(i)]);
    if (!node.ok) {
      throw NumericalError("Gauss-Hermite Newton polish failed at order " + std::to_string(n));
    }
    out.push_back(node);
  }
  return out;
}

// Positive nodes by marching outward from the origin: each guess adds the
// local WKB spacing pi / sqrt(2n + 1 - z^2) to the previous node, then Newton.
// Stops once weights underflow. A Sturm count at the end confirms no node was
// skipped; returns false if any check fails.
inline bool positive_nodes_by_marching(const HermiteRecurrence& rec,
                                       std::vector<PolishedNode>* out) {
  const std::size_t n = rec.a.size();
  const double edge_sq = 2.0 * static_cast<double>(n) + 1.0;
  const std::size_t count = n / 2;
  const double log_tiny = std::log(std::numeric_limits<double>::denorm_min());
  out->clear();
  // For even n the nodes nearest the origin sit at +-spacing/2.
  double prev = n % 2 == 1 ? 0.0 : -0.5 * std::numbers::pi / std::sqrt(edge_sq);
  double step = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double room = edge_sq - prev * prev;
    if (!(room > 0.0)) return false;
    step = std::numbers::pi / std::sqrt(room);
    const auto node = polish(rec, prev + step);
    if (!node.ok || node.z <= prev + 0.5 * step || node.z >= prev + 1.5 * step) return false;
    out->push_back(node);
    if (node.log_weight < log_tiny) break;
    prev = node.z;
  }
  // Every node found is a root; the count shows none lies between them.
  const double last = out->back().z;
  const std::size_t below_zero = n / 2;
  const std::size_t expected = below_zero + (n % 2) + out->size();
  return nodes_below(n, last + 0.25 * step) == expected;
}

// Gauss-Hermite nodes and weights. Nodes are polished by Newton on the
// recurrence; weights come from its derivative, assembled in log space so they
// stay relatively accurate far into the tails.
inline QuadratureRule build_gauss_hermite(std::size_t n) {
  const HermiteRecurrence rec(n);
  const bool has_zero = n % 2 == 1;
  PolishedNode zero;
  if (has_zero) {
    zero = polish(rec, 0.0);
    zero.z = 0.0;
  }
  std::vector<PolishedNode> positive;
  if (n > 1 && !positive_nodes_by_marching(rec, &positive)) {
    positive = positive_nodes_from_eigenvalues(rec);
  }
  QuadratureRule rule = assemble(n, positive, has_zero, zero);
  for (std::size_t k = 1; k < rule.nodes.size(); ++k) {
    if (!(rule.nodes[k] > rule.nodes[k - 1])) {
      throw NumericalError("Gauss-Hermite nodes not strictly increasing at order " +
                           std::to_string(n));
    }
  }
  return rule;
}

} // namespace detail

/// Cached Gauss-Hermite rule of the given order. Rules are immutable and the
/// returned reference stays valid for the life of the program.
inline const QuadratureRule& gauss_hermite(std::size_t order) {
  if (order == 0) throw DomainError("quadrature order must be >= 1");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    auto rule = std::make_unique<const QuadratureRule>(detail::build_gauss_hermite(order));
    it = cache.emplace(order, std::move(rule)).first;
  }
  return *it->second;
}

inline constexpr std::size_t kDefaultQuadratureOrder = 200;
inline constexpr std::size_t kMaxQuadratureOrder = 6400;
inline constexpr double kQuadratureTolerance = 1e-8;

template <class T>
struct Converged {
  T value;
  std::size_t order = 0;
  bool converged = false;
};

/// Evaluates compute(rule) at order q and 2q, doubling q until two successive
/// results agree to rel_tol (relative to max(|value|, abs_floor)), starting at
/// start_order. Returns the finer of the last two results.
template <class Compute, class Distance>
auto converge_in_order(Compute&& compute, Distance&& distance,
                       std::size_t start_order = kDefaultQuadratureOrder,
                       std::size_t max_order = kMaxQuadratureOrder) {
  using T = decltype(compute(gauss_hermite(start_order)));
  T coarse = compute(gauss_hermite(start_order));
  std::size_t q = start_order;
  while (2 * q <= max_order) {
    q *= 2;
    T fine = compute(gauss_hermite(q));
    if (distance(coarse, fine)) return Converged<T>{std::move(fine), q, true};
    coarse = std::move(fine);
  }
  return Converged<T>{std::move(coarse), q, false};
}

/// E[f(Z)] with order escalation until the 200-vs-400 (400-vs-800, ...) check
/// passes at rel_tol.
template <class F>
Converged<double> converged_expectation(F&& f, double rel_tol = kQuadratureTolerance,
                                        double abs_floor = 0.0) {
  return converge_in_order(
      [&](const QuadratureRule& rule) { return rule.expect(f); },
      [&](double a, double b) {
        return std::abs(a - b) <= rel_tol * std::max(std::abs(b), abs_floor);
      });
}

} // namespace gaussnet

#endif // GAUSSNET_QUADRATURE_HPP_
