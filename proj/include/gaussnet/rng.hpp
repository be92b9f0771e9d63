#ifndef GAUSSNET_RNG_HPP_
#define GAUSSNET_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace gaussnet {

/// Philox4x32-10 counter-based generator (Salmon et al.). The 64-bit key is
/// the master seed; the upper half of the 128-bit counter is the stream index
/// and the lower half counts blocks, so every (seed, stream) pair owns a
/// disjoint 2^64-block sequence.
class Philox4x32 {
public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (next_ == 2) refill();
    return buffer_[next_++];
  }

  static Block block(Block ctr, Key key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += w0;
        key[1] += w1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

private:
  void refill() {
    const Block out = block({static_cast<std::uint32_t>(counter_),
                             static_cast<std::uint32_t>(counter_ >> 32),
                             static_cast<std::uint32_t>(stream_),
                             static_cast<std::uint32_t>(stream_ >> 32)},
                            key_);
    ++counter_;
    buffer_[0] = out[0] | (static_cast<std::uint64_t>(out[1]) << 32);
    buffer_[1] = out[2] | (static_cast<std::uint64_t>(out[3]) << 32);
    next_ = 0;
  }

  Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int next_ = 2;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Identifies one reproducible random stream.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Child stream k of this stream, for splitting one job into chunks.
  [[nodiscard]] SeedSpec substream(std::uint64_t k) const {
    return {master_seed, splitmix64(stream_index ^ splitmix64(k + 0x632BE59BD9B4E019ull))};
  }

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Standard normal draws: Philox bits through Boost's ziggurat sampler.
/// Output is bit-exact for a given (seed, stream, Boost version).
class NormalStream {
public:
  explicit NormalStream(const SeedSpec& seed) : engine_(seed.master_seed, seed.stream_index) {}
  double operator()() { return dist_(engine_); }

private:
  Philox4x32 engine_;
  boost::random::normal_distribution<double> dist_;
};

} // namespace gaussnet

#endif // GAUSSNET_RNG_HPP_
