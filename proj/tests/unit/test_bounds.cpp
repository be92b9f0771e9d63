#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gaussnet/bounds.hpp"

using namespace gaussnet;

namespace {

constexpr double kTanhVariance = 0.39429449039784117442;
constexpr double kRadical = 2.69121546649823; // sqrt(3 + 3 sqrt 2), evaluated independently

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(SingleUnitBound, RadicalValue) {
  EXPECT_NEAR(std::sqrt(3.0 + 3.0 * std::numbers::sqrt2), kRadical, 1e-13);
  EXPECT_NEAR(bound_theorem_1(1, ActivationSpec::tanh(), Metric::KS).breakdown.geometry_term,
              kRadical, 1e-13);
}

TEST(SingleUnitBound, TanhKsExample) {
  const auto r = bound_theorem_1(10000, ActivationSpec::tanh(), Metric::KS);
  EXPECT_LT(rel(r.value, 2.0 / kTanhVariance * kRadical / 100.0), 1e-9);
  EXPECT_LT(rel(r.sigma_sq, kTanhVariance), 1e-9);
  EXPECT_EQ(r.theorem, "single-unit");
  EXPECT_LT(rel(r.breakdown.product() / 100.0, r.value), 1e-12);
}

TEST(SingleUnitBound, QuadruplingWidthHalves) {
  for (Metric m : {Metric::KS, Metric::TV, Metric::W1}) {
    for (std::size_t n : {1u, 7u, 250u}) {
      const double a = bound_theorem_1(n, ActivationSpec::cubic(), m).value;
      const double b = bound_theorem_1(4 * n, ActivationSpec::cubic(), m).value;
      EXPECT_LT(rel(b, a / 2.0), 1e-15);
    }
  }
}

TEST(SingleUnitBound, KsIsHalfTv) {
  const auto act = ActivationSpec::sau(2.0);
  EXPECT_LT(rel(bound_theorem_1(9, act, Metric::KS).value,
                bound_theorem_1(9, act, Metric::TV).value / 2.0),
            1e-15);
}

TEST(SingleUnitBound, ZeroActivationRejected) {
  CustomActivation zero{[](double) { return 0.0; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }};
  EXPECT_THROW(bound_theorem_1(4, ActivationSpec::custom(zero, 1, 0, 0), Metric::KS), DomainError);
  EXPECT_THROW(bound_theorem_1(0, ActivationSpec::tanh(), Metric::KS), ConfigError);
}

TEST(SingleInputBound, ReducesToSingleUnitOnUnitSlice) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ua(1.0, 3.0), ub(0.0, 2.0), ug(0.0, 4.0);
  const ActivationSpec bases[] = {ActivationSpec::tanh(), ActivationSpec::cubic(),
                                  ActivationSpec::softplus(3.0), ActivationSpec::sau(1.5)};
  for (int k = 0; k < 20; ++k) {
    auto act = bases[k % 4];
    if (k >= 4) act = act.with_envelope(std::max(act.envelope_a, ua(gen)),
                                        std::max(act.envelope_b, ub(gen)),
                                        act.envelope_b > 0 ? act.envelope_gamma : ug(gen));
    for (Metric m : {Metric::KS, Metric::TV, Metric::W1}) {
      const auto t1 = bound_theorem_1(13, act, m);
      const auto t2 = bound_theorem_2(unit_network(13), act, m);
      EXPECT_LT(rel(t2.value, t1.value), 1e-12) << k;
    }
  }
}

TEST(SingleInputBound, IdentityHandExpansion) {
  // Identity with envelope 1 + |x|: E(1 + G|Z|)^4 = 1 + 4G m1 + 6G^2 + 4G^3 m3 + 3G^4.
  const double m1 = std::sqrt(2.0 / std::numbers::pi);
  const double m3 = 2.0 * m1;
  for (double sw : {0.5, 1.0, 2.0, 4.0}) {
    NetworkConfig c;
    c.width = 25;
    c.sigma_w = sw;
    const double g = sw, g2 = g * g, g4 = g2 * g2;
    const double s2 = sw * sw * g2;
    const double env2 = std::sqrt(1 + 4 * g * m1 + 6 * g2 + 4 * g2 * g * m3 + 3 * g4);
    const double radical = std::sqrt(g2 + g4 * (2.0 + std::sqrt(3.0 * (1 + 2 * g2 + 3 * g4))));
    const double expect = std::sqrt(8.0 / (s2 * std::numbers::pi)) * sw * sw * radical * env2 / 5.0;
    const auto r = bound_theorem_2(c, ActivationSpec::identity(), Metric::W1);
    EXPECT_LT(rel(r.value, expect), 1e-9) << "sigma_w=" << sw;
    EXPECT_LT(rel(r.sigma_sq, s2), 1e-12);
  }
}

TEST(SingleInputBound, RejectsMultipleInputs) {
  NetworkConfig c;
  c.inputs = {{1.0}, {0.5}};
  EXPECT_THROW(bound_theorem_2(c, ActivationSpec::tanh(), Metric::KS), DomainError);
}

TEST(MultiInputBound, SingleInputValue) {
  for (const auto& act : {ActivationSpec::tanh(), ActivationSpec::cubic()}) {
    const auto r = bound_theorem_3(unit_network(16), act);
    const double env = envelope_l4(act, 1.0);
    const double kt = std::sqrt(3.0 + std::sqrt(18.0)) * env * env;
    EXPECT_LT(rel(*r.breakdown.k_tilde, kt), 1e-12);
    EXPECT_LT(rel(r.value, 2.0 * kt / 4.0), 1e-12);
    EXPECT_DOUBLE_EQ(*r.breakdown.spectrum_ratio, 1.0);
    EXPECT_EQ(r.theorem, "multi-input");
  }
}

TEST(MultiInputBound, PermutationInvariant) {
  NetworkConfig c;
  c.input_dim = 2;
  c.width = 9;
  c.sigma_w = 1.3;
  c.sigma_b = 0.2;
  c.inputs = {{1.0, 0.0}, {0.4, 0.9}, {-0.7, 0.2}};
  const double a = bound_theorem_3(c, ActivationSpec::tanh()).value;
  c.inputs = {{-0.7, 0.2}, {1.0, 0.0}, {0.4, 0.9}};
  EXPECT_LT(rel(bound_theorem_3(c, ActivationSpec::tanh()).value, a), 1e-12);
}

TEST(MultiInputBound, Errors) {
  NetworkConfig c;
  c.inputs = {{1.0}, {1.0}};
  EXPECT_THROW(bound_theorem_3(c, ActivationSpec::tanh()), SingularCovarianceError);
  EXPECT_THROW(bound_theorem_3(unit_network(4), ActivationSpec::tanh(), Metric::KS),
               UnsupportedMetricError);
  EXPECT_THROW(bound_theorem_3(unit_network(4), ActivationSpec::tanh(), Metric::TV),
               UnsupportedMetricError);
}

TEST(Bounds, MonotoneInWidth) {
  NetworkConfig c;
  c.sigma_w = 0.8;
  c.sigma_b = 0.5;
  c.inputs = {{1.5}};
  NetworkConfig multi = c;
  multi.inputs = {{1.5}, {-0.5}};
  double prev1 = INFINITY, prev2 = INFINITY, prev3 = INFINITY;
  double k1 = 0, k2 = 0, k3 = 0;
  for (std::size_t n = 1; n <= 4096; n *= 2) {
    const auto r1 = bound_theorem_1(n, ActivationSpec::tanh(), Metric::W1);
    const auto r2 = bound_theorem_2(c.with_width(n), ActivationSpec::tanh(), Metric::W1);
    const auto r3 = bound_theorem_3(multi.with_width(n), ActivationSpec::tanh());
    EXPECT_LT(r1.value, prev1);
    EXPECT_LT(r2.value, prev2);
    EXPECT_LT(r3.value, prev3);
    const double sn = std::sqrt(double(n));
    if (n == 1) {
      k1 = r1.value;
      k2 = r2.value;
      k3 = r3.value;
    }
    EXPECT_LT(rel(r1.value * sn, k1), 1e-12);
    EXPECT_LT(rel(r2.value * sn, k2), 1e-12);
    EXPECT_LT(rel(r3.value * sn, k3), 1e-12);
    prev1 = r1.value;
    prev2 = r2.value;
    prev3 = r3.value;
  }
}

TEST(Bounds, MetricRatios) {
  NetworkConfig c;
  c.sigma_w = 1.7;
  c.sigma_b = 0.3;
  c.inputs = {{0.6}};
  c.width = 30;
  const auto act = ActivationSpec::cubic();
  const auto ks = bound_theorem_2(c, act, Metric::KS);
  const auto tv = bound_theorem_2(c, act, Metric::TV);
  const auto w1 = bound_theorem_2(c, act, Metric::W1);
  EXPECT_LT(rel(tv.value, 2.0 * ks.value), 1e-12);
  EXPECT_LT(rel(w1.value / tv.value, std::sqrt(tv.sigma_sq / (2.0 * std::numbers::pi))), 1e-12);
}

TEST(Bounds, SingleOutputDispatch) {
  EXPECT_TRUE(is_unit_slice(unit_network(3)));
  EXPECT_EQ(single_output_bound(unit_network(3), ActivationSpec::tanh(), Metric::KS).theorem,
            "single-unit");
  NetworkConfig c = unit_network(3);
  c.sigma_b = 0.1;
  EXPECT_FALSE(is_unit_slice(c));
  EXPECT_EQ(single_output_bound(c, ActivationSpec::tanh(), Metric::KS).theorem, "single-input");
}

TEST(ReluGrowth, StrictlyIncreasing) {
  for (auto family : {ActivationKind::softplus_approx, ActivationKind::sau_approx}) {
    const auto pts = relu_growth(family, {1, 2, 4, 8, 16}, 100, Metric::W1);
    ASSERT_EQ(pts.size(), 5u);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_GT(pts[i].report.value, pts[i - 1].report.value) << "m=" << pts[i].m;
    }
  }
  EXPECT_THROW(relu_growth(ActivationKind::tanh, {1}, 10, Metric::W1), ConfigError);
}
