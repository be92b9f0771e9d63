#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gaussnet/gauss_moments.hpp"
#include "gaussnet/spectra.hpp"
#include "oracles.hpp"

using namespace gaussnet;

namespace {

// Precomputed reference values (not produced by this library):
//  E[tanh(Z)^2] by a 10^6-draw Monte Carlo, numpy default_rng(20240601).
constexpr double kTanhSqMcMean = 0.3941467693;
constexpr double kTanhSqMcStdErr = 3.121e-4;
//  E[(6 + |Z|^3)^4]^{1/4} to 20 digits with mpmath.
constexpr double kCubicEnvelopeL4 = 12.402740983699397743;

NetworkConfig unit() { return NetworkConfig{}; }

} // namespace

TEST(AbsMoment, Examples) {
  EXPECT_EQ(abs_moment(0.0), 1.0);
  EXPECT_NEAR(abs_moment(2.0), 1.0, 1e-15);
  EXPECT_NEAR(abs_moment(4.0), 3.0, 1e-14);
  EXPECT_NEAR(abs_moment(6.0), 15.0, 1e-13);
  EXPECT_NEAR(abs_moment(1.0), std::sqrt(2.0 / std::numbers::pi), 1e-15);
  EXPECT_THROW(abs_moment(-0.5), DomainError);
}

TEST(AbsMoment, MatchesHalfLineQuadrature) {
  for (double p : {0.3, 1.5, 2.7, 5.2, 9.0}) {
    const double q = oracle::even_normal_expectation([&](double z) { return std::pow(z, p); });
    EXPECT_NEAR(abs_moment(p), q, 1e-10 * q) << p;
  }
}

TEST(EnvelopeL4, Examples) {
  EXPECT_NEAR(envelope_l4(1, 0, 0, 1), 1.0, 1e-15);
  EXPECT_NEAR(envelope_l4(0, 1, 1, 1), std::pow(3.0, 0.25), 1e-14);
  EXPECT_NEAR(envelope_l4(6, 1, 3, 1), kCubicEnvelopeL4, 1e-12 * kCubicEnvelopeL4);
  EXPECT_THROW(envelope_l4(-1, 0, 0, 1), DomainError);
  EXPECT_THROW(envelope_l4(1, 0, 0, 0), DomainError);
}

TEST(EnvelopeL4, CubicAgainstGaussHermiteRefinement) {
  // The |Z|^3 kink slows Gauss-Hermite down: order 200 is only good to ~1e-7,
  // order 1600 to ~1e-8.
  auto gh = [](std::size_t q) {
    return std::pow(gauss_hermite(q).expect([](double z) {
      const double t = 6.0 + std::pow(std::abs(z), 3);
      return t * t * t * t;
    }), 0.25);
  };
  const double closed = envelope_l4(6, 1, 3, 1);
  EXPECT_NEAR(gh(200), closed, 1e-6 * closed);
  EXPECT_NEAR(gh(1600), closed, 1e-8 * closed);
  EXPECT_LT(std::abs(gh(1600) - closed), std::abs(gh(200) - closed));
}

TEST(EnvelopeL4, MatchesDirectQuadratureRandom) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ua(0.0, 3.0);
  std::uniform_real_distribution<double> ug(0.0, 4.0);
  std::uniform_real_distribution<double> us(0.2, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double a = ua(rng), b = ua(rng), g = ug(rng), s = us(rng);
    const double direct = std::pow(oracle::even_normal_expectation([&](double z) {
      const double t = a + b * std::pow(s * z, g);
      return t * t * t * t;
    }), 0.25);
    EXPECT_NEAR(envelope_l4(a, b, g, s), direct, 1e-8 * direct)
        << a << " " << b << " " << g << " " << s;
  }
}

TEST(NetworkVariance, Identity) {
  const double v = network_variance(unit(), ActivationSpec::identity(), gauss_hermite(200));
  EXPECT_NEAR(v, 1.0, 1e-13);
}

TEST(NetworkVariance, Cubic) {
  const double v = network_variance(unit(), ActivationSpec::cubic(), gauss_hermite(200));
  EXPECT_NEAR(v, 15.0, 1e-12);
}

TEST(NetworkVariance, TanhAgainstMonteCarloOracle) {
  const double v = network_variance(unit(), ActivationSpec::tanh());
  EXPECT_NEAR(v, kTanhSqMcMean, 3.0 * kTanhSqMcStdErr);
}

TEST(NetworkVariance, RejectsCoarseRules) {
  EXPECT_THROW(network_variance(unit(), ActivationSpec::tanh(), gauss_hermite(19)), DomainError);
  EXPECT_NO_THROW(network_variance(unit(), ActivationSpec::tanh(), gauss_hermite(20)));
}

TEST(NetworkVariance, IncludesSigmas) {
  NetworkConfig c;
  c.input_dim = 2;
  c.sigma_w = 0.7;
  c.sigma_b = 0.4;
  c.inputs = {{1.0, -2.0}};
  const double g2 = gamma_sq(c, 0);
  // Identity: sigma_w^2 Gamma^2 + sigma_b^2.
  EXPECT_NEAR(network_variance(c, ActivationSpec::identity()),
              0.49 * g2 + 0.16, 1e-12);
}

TEST(CovarianceMatrix, IdentityActivationIsLinearKernel) {
  NetworkConfig c;
  c.input_dim = 2;
  c.sigma_w = 0.9;
  c.sigma_b = 0.3;
  c.inputs = {{1.0, 0.5}, {-0.3, 2.0}, {0.7, 0.7}};
  const auto cov = covariance_matrix(c, ActivationSpec::identity());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double expect = 0.81 * preactivation_covariance(c, i, k) + 0.09;
      EXPECT_NEAR(cov.entries(i, k), expect, 1e-12 * std::abs(expect) + 1e-14);
    }
  }
}

TEST(CovarianceMatrix, DiagonalMatchesNetworkVariance) {
  NetworkConfig c;
  c.input_dim = 2;
  c.sigma_w = 1.2;
  c.sigma_b = 0.5;
  c.inputs = {{1.0, 0.0}, {0.3, -0.8}, {2.0, 1.0}};
  for (const auto& act : {ActivationSpec::tanh(), ActivationSpec::cubic(),
                          ActivationSpec::softplus(3.0), ActivationSpec::sau(2.0)}) {
    const auto cov = covariance_matrix(c, act);
    for (std::size_t i = 0; i < 3; ++i) {
      const double v = network_variance(c, act, i);
      EXPECT_NEAR(cov.entries(i, i), v, 1e-10 * v);
    }
  }
}

TEST(CovarianceMatrix, OrthogonalTanhInputsAreUncorrelated) {
  NetworkConfig c;
  c.input_dim = 2;
  c.inputs = {{1.0, 0.0}, {0.0, 1.0}};
  const auto cov = covariance_matrix(c, ActivationSpec::tanh());
  EXPECT_NEAR(cov.entries(0, 1), 0.0, 1e-15);
}

TEST(CovarianceMatrix, SymmetricAndPsd) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 5; ++trial) {
    NetworkConfig c;
    c.input_dim = 3;
    c.sigma_w = 1.0;
    c.sigma_b = 0.2;
    c.inputs.assign(4, std::vector<double>(3));
    for (auto& x : c.inputs)
      for (auto& v : x) v = z(rng);
    const auto cov = covariance_matrix(c, trial % 2 ? ActivationSpec::tanh() : ActivationSpec::cubic());
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 4; ++k)
        EXPECT_NEAR(cov.entries(i, k), cov.entries(k, i), 1e-12 * std::abs(cov.entries(i, i)));
    const auto s = symmetric_eigenvalues(cov.entries);
    EXPECT_GE(s.lambda_min, -1e-9 * s.lambda_max);
  }
}

TEST(CovarianceMatrix, PerfectlyCorrelatedBranch) {
  NetworkConfig c;
  c.input_dim = 1;
  c.inputs = {{1.0}, {2.0}, {-1.0}};
  const auto cov = covariance_matrix(c, ActivationSpec::tanh());
  // x_3 = -x_1 and tanh is odd: c_13 = -c_11.
  EXPECT_NEAR(cov.entries(0, 2), -cov.entries(0, 0), 1e-14);
  // c_12 = E[tanh(Z) tanh(2Z)].
  const double direct = gauss_hermite(400).expect([](double z) {
    return std::tanh(z) * std::tanh(2 * z);
  });
  EXPECT_NEAR(cov.entries(0, 1), direct, 1e-10);
}

TEST(CovarianceMatrix, BivariateAgainstMonteCarlo) {
  // Correlated preactivations: compare with a plain Monte Carlo of the same
  // bivariate expectation.
  NetworkConfig c;
  c.input_dim = 2;
  c.sigma_w = 1.0;
  c.sigma_b = 0.5;
  c.inputs = {{1.0, 0.2}, {0.4, 1.0}};
  const auto cov = covariance_matrix(c, ActivationSpec::tanh());
  const double g1 = std::sqrt(gamma_sq(c, 0));
  const double g2 = std::sqrt(gamma_sq(c, 1));
  const double rho = preactivation_covariance(c, 0, 1) / (g1 * g2);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  const int m = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z1 = z(rng), z2 = z(rng);
    const double v = std::tanh(g1 * z1) * std::tanh(g2 * (rho * z1 + std::sqrt(1 - rho * rho) * z2));
    s += v;
    s2 += v * v;
  }
  const double mean = s / m;
  const double se = std::sqrt((s2 / m - mean * mean) / m);
  EXPECT_NEAR(cov.entries(0, 1), mean + 0.25, 4.0 * se);
}
