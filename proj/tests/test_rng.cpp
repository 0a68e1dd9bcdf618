#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "sdefit/rng.hpp"
#include "sdefit/stats.hpp"

using namespace sdefit;

TEST(Philox, KnownAnswerZeroCounterZeroKey) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RandomStream, DrawsArePureFunctionsOfIndex) {
  const RandomStream a(42, 3), b(42, 3);
  std::vector<double> fwd(257);
  a.fill_normals(fwd);
  for (std::size_t i = fwd.size(); i-- > 0;) EXPECT_EQ(fwd[i], b.normal(i));
  std::vector<double> tail(100);
  a.fill_normals(tail, 157);
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], fwd[157 + i]);
}

TEST(RandomStream, StreamsAndSeedsDiffer) {
  const RandomStream a(1, 0), b(1, 1), c(2, 0);
  EXPECT_NE(a.normal(0), b.normal(0));
  EXPECT_NE(a.normal(0), c.normal(0));
  EXPECT_NE(a.words(0), RandomStream(1, 1ull << 40).words(0));
}

TEST(RandomStream, UniformsInOpenInterval) {
  const RandomStream r(7, 0);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = r.uniform(i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, NormalMoments) {
  const RandomStream r(2024, 5);
  std::vector<double> z(200000);
  r.fill_normals(z);
  EXPECT_NEAR(stats::mean(z), 0.0, 0.01);
  EXPECT_NEAR(stats::variance(z), 1.0, 0.01);
  double m4 = 0.0;
  for (double v : z) m4 += v * v * v * v;
  EXPECT_NEAR(m4 / z.size(), 3.0, 0.06);
  EXPECT_LT(stats::ks_distance_normal(z), 1.63 / std::sqrt(200000.0));
}

TEST(RandomStream, BelowIsInRangeAndCoversAll) {
  const RandomStream r(9, 1);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto v = r.below(i, 17);
    ASSERT_LT(v, 17u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 17u);
}

TEST(Splitmix, KnownValues) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafull);
  EXPECT_NE(splitmix64(1), splitmix64(2));
}
