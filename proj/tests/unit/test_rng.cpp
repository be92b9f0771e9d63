#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gaussnet/rng.hpp"

using namespace gaussnet;

TEST(Philox, KnownAnswerVectors) {
  // Published Philox4x32-10 test vectors.
  const auto a = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(a, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  const auto b = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                   {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(b, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  const auto c = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                   {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(c, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreDeterministicAndDistinct) {
  Philox4x32 a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(va, d());
  }
}

TEST(SeedSpec, SubstreamsArePureAndDistinct) {
  const SeedSpec s{5, 9};
  EXPECT_EQ(s.substream(3), s.substream(3));
  EXPECT_NE(s.substream(3), s.substream(4));
  EXPECT_NE(s.substream(0).stream_index, s.stream_index);
  EXPECT_EQ(s.substream(1).master_seed, 5u);
}

TEST(NormalStream, MomentsAndIndependence) {
  NormalStream a({1, 0}), b({1, 1});
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0, cross = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a(), y = b();
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
    cross += x * y;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
  EXPECT_LT(std::abs(cross / n), 4.0 / std::sqrt(n));
}
