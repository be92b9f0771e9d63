#ifndef GAUSSNET_SAMPLER_HPP_
#define GAUSSNET_SAMPLER_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gaussnet/activation.hpp"
#include "gaussnet/config_io.hpp"
#include "gaussnet/errors.hpp"
#include "gaussnet/gauss_moments.hpp"
#include "gaussnet/matrix.hpp"
#include "gaussnet/model.hpp"
#include "gaussnet/rng.hpp"

namespace gaussnet {

/// Draws stored row-major: row i holds every draw of output i.
struct SampleBatch {
  std::vector<double> values;
  std::size_t rows = 1; // p
  std::size_t count = 0;
  std::size_t width = 0; // 0 for reference samples
  std::uint64_t config_hash = 0;

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {values.data() + i * count, count};
  }
  [[nodiscard]] double at(std::size_t i, std::size_t draw) const {
    return values[i * count + draw];
  }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

/// Realizations of F(x_1..x_p) = sigma_w / sqrt(n) sum_j w_j tau(sigma_w <w0_j, x_i>
/// + sigma_b b0_j) + sigma_b b. Per draw the normals are consumed in the order
/// w_j, w0_{j,1..d}, b0_j for j = 1..n, then b; all p outputs of a draw share
/// them. Memory is O(p) beyond the output.
inline SampleBatch sample_network(const NetworkConfig& cfg, const ActivationSpec& act,
                                  std::size_t count, const SeedSpec& seed) {
  validate_config(cfg, act);
  if (count == 0) throw DomainError("sample count must be >= 1");
  const std::size_t p = cfg.input_count();
  const std::size_t d = cfg.input_dim;
  const std::size_t n = cfg.width;
  const double scale = cfg.sigma_w / std::sqrt(static_cast<double>(n));

  SampleBatch batch;
  batch.rows = p;
  batch.count = count;
  batch.width = n;
  batch.config_hash = config_hash(cfg, act);
  batch.values.resize(p * count);

  // Pre-scaled inputs so the inner loop is a plain dot product.
  std::vector<double> xs(p * d);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t t = 0; t < d; ++t) xs[i * d + t] = cfg.sigma_w * cfg.inputs[i][t];

  NormalStream normal(seed);
  std::vector<double> w0(d);
  std::vector<double> acc(p);
  dispatch(act, [&](const auto& tau) {
    for (std::size_t draw = 0; draw < count; ++draw) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double w = normal();
        for (std::size_t t = 0; t < d; ++t) w0[t] = normal();
        const double b0 = cfg.sigma_b * normal();
        for (std::size_t i = 0; i < p; ++i) {
          double y = b0;
          for (std::size_t t = 0; t < d; ++t) y += xs[i * d + t] * w0[t];
          acc[i] += w * tau.value(y);
        }
      }
      const double b = cfg.sigma_b * normal();
      for (std::size_t i = 0; i < p; ++i) {
        const double f = scale * acc[i] + b;
        if (!std::isfinite(f)) {
          throw NumericalError("non-finite network output at draw " + std::to_string(draw));
        }
        batch.values[i * count + draw] = f;
      }
    }
    return 0;
  });
  return batch;
}

/// Exact N(0, sigma_sq) draws.
inline SampleBatch sample_reference(double sigma_sq, std::size_t count, const SeedSpec& seed) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw DomainError("reference variance must be > 0");
  }
  if (count == 0) throw DomainError("sample count must be >= 1");
  SampleBatch batch;
  batch.count = count;
  batch.values.resize(count);
  const double sd = std::sqrt(sigma_sq);
  NormalStream normal(seed);
  for (auto& v : batch.values) v = sd * normal();
  return batch;
}

/// Exact N(0, C) draws via the Cholesky factor of C.
inline SampleBatch sample_reference(const Matrix& c, std::size_t count, const SeedSpec& seed) {
  if (count == 0) throw DomainError("sample count must be >= 1");
  const Matrix l = cholesky(c);
  const std::size_t p = c.rows();
  SampleBatch batch;
  batch.rows = p;
  batch.count = count;
  batch.values.resize(p * count);
  NormalStream normal(seed);
  std::vector<double> z(p);
  for (std::size_t draw = 0; draw < count; ++draw) {
    for (auto& v : z) v = normal();
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * z[k];
      batch.values[i * count + draw] = s;
    }
  }
  return batch;
}

inline SampleBatch sample_reference(const CovarianceMatrix& c, std::size_t count,
                                    const SeedSpec& seed) {
  return sample_reference(c.entries, count, seed);
}

/// One value per line, 17 significant digits. Multi-output batches write the
/// p values of a draw on one line separated by spaces.
inline void write_samples(const SampleBatch& batch, std::FILE* out) {
  for (std::size_t draw = 0; draw < batch.count; ++draw) {
    for (std::size_t i = 0; i < batch.rows; ++i) {
      if (std::fprintf(out, i + 1 < batch.rows ? "%.17g " : "%.17g\n", batch.at(i, draw)) < 0) {
        throw IoError("failed writing samples");
      }
    }
  }
}

inline void write_samples(const SampleBatch& batch, const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_samples(batch, f.get());
}

} // namespace gaussnet

#endif // GAUSSNET_SAMPLER_HPP_
