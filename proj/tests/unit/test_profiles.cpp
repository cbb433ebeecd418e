#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "stc/errors.hpp"
#include "stc/profiles.hpp"

namespace {

using namespace stc;

BitVector periodic_bits(std::int64_t period, std::int64_t offset, std::size_t count) {
  return ProfileGenerator(PeriodicSpec{period, offset}, 0).take(count);
}

TEST(Periodic, EmitsAtPeriodMultiples) {
  EXPECT_EQ(periodic_bits(4, 0, 8), (BitVector{0, 0, 0, 1, 0, 0, 0, 1}));
}

TEST(Periodic, CumulativeIsFloorOfSlotOverPeriod) {
  const auto bits = periodic_bits(2, 0, 6);
  EXPECT_EQ(cumulative_prefix(bits), (std::vector<std::int64_t>{0, 1, 1, 2, 2, 3}));
  const auto long_bits = periodic_bits(7, 0, 500);
  const auto s = cumulative_prefix(long_bits);
  for (std::size_t t = 1; t <= s.size(); ++t) ASSERT_EQ(s[t - 1], static_cast<std::int64_t>(t / 7));
}

TEST(Periodic, OffsetIsATimeShift) {
  for (std::int64_t delta : {1, 3, 5, 20}) {
    for (std::int64_t offset = 0; offset < delta; ++offset) {
      const auto base = periodic_bits(delta, 0, 300);
      const auto shifted = periodic_bits(delta, offset, 300);
      for (std::size_t t = 0; t < 300; ++t) {
        const Bit expect = t < static_cast<std::size_t>(offset) ? 0 : base[t - offset];
        ASSERT_EQ(shifted[t], expect) << "delta=" << delta << " offset=" << offset << " t=" << t;
      }
    }
  }
}

TEST(Periodic, EmpiricalRateExact) {
  EXPECT_DOUBLE_EQ(empirical_rate(periodic_bits(4, 0, 4000)), 0.25);
}

TEST(Explicit, ReplaysBitsThenZeros) {
  const BitVector bits{0, 1, 0, 0, 1, 0, 1};
  ProfileGenerator g(ExplicitSpec{bits}, 0);
  EXPECT_EQ(g.take(7), bits);
  EXPECT_EQ(g.take(3), (BitVector{0, 0, 0}));
  EXPECT_EQ(cumulative_prefix(bits), (std::vector<std::int64_t>{0, 1, 1, 1, 2, 2, 3}));
}

TEST(Bernoulli, DegenerateRates) {
  EXPECT_EQ(ProfileGenerator(BernoulliSpec{1.0}, 3).take(10), BitVector(10, 1));
  EXPECT_EQ(ProfileGenerator(BernoulliSpec{0.0}, 3).take(10), BitVector(10, 0));
  EXPECT_DOUBLE_EQ(empirical_rate(BitVector(10, 1)), 1.0);
}

TEST(Bernoulli, RateWithinLawOfLargeNumbers) {
  const auto bits = ProfileGenerator(BernoulliSpec{0.3}, 42).take(100000);
  EXPECT_NEAR(empirical_rate(bits), 0.3, 0.01);
}

TEST(Bernoulli, ReplayIsIdentical) {
  for (std::uint64_t seed : {1u, 2u, 77u}) {
    EXPECT_EQ(ProfileGenerator(BernoulliSpec{0.4}, seed).take(5000),
              ProfileGenerator(BernoulliSpec{0.4}, seed).take(5000));
  }
  EXPECT_NE(ProfileGenerator(BernoulliSpec{0.4}, 1).take(5000),
            ProfileGenerator(BernoulliSpec{0.4}, 2).take(5000));
}

TEST(Mmb, SingleStateEqualsBernoulli) {
  for (double rate : {0.1, 0.5, 0.93}) {
    const MmbSpec mmb{{rate}, {1.0}, 0};
    EXPECT_EQ(ProfileGenerator(mmb, 9).take(20000), ProfileGenerator(BernoulliSpec{rate}, 9).take(20000));
  }
}

TEST(Mmb, StationaryRate) {
  const MmbSpec mmb{{0.9, 0.1}, {0.95, 0.05, 0.05, 0.95}, 0};
  EXPECT_DOUBLE_EQ(nominal_rate(mmb), 0.5);
  EXPECT_NEAR(empirical_rate(ProfileGenerator(mmb, 4).take(200000)), 0.5, 0.03);
}

TEST(Mmb, RejectsMalformedParameters) {
  EXPECT_THROW(ProfileGenerator(MmbSpec{{0.5, 0.5}, {1.0}, 0}, 0), Error);
  EXPECT_THROW(ProfileGenerator(MmbSpec{{0.5}, {0.7}, 0}, 0), Error);
}

TEST(EmpiricalRate, EmptyThrows) {
  EXPECT_THROW(empirical_rate(BitVector{}), ArgumentError);
}

TEST(CumulativePrefix, AllZeros) {
  EXPECT_EQ(cumulative_prefix(BitVector(5, 0)), std::vector<std::int64_t>(5, 0));
}

TEST(StreamRng, DependsOnEveryKeyComponent) {
  auto a = make_stream_rng(1, 0, 0)();
  EXPECT_EQ(a, make_stream_rng(1, 0, 0)());
  EXPECT_NE(a, make_stream_rng(2, 0, 0)());
  EXPECT_NE(a, make_stream_rng(1, 1, 0)());
  EXPECT_NE(a, make_stream_rng(1, 0, 1)());
}

TEST(ProfileText, ParsesLinesAndSkipsComments) {
  const auto rows = parse_profile_text("# two streams\n0101\n\n1100\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (BitVector{0, 1, 0, 1}));
  EXPECT_EQ(rows[1], (BitVector{1, 1, 0, 0}));
  EXPECT_THROW(parse_profile_text("01x1\n"), Error);
}

TEST(ProfileText, LoadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "stc_profile_test.txt";
  {
    std::ofstream f(path);
    f << "1\n01\n";
  }
  const auto rows = load_profile_file(path);
  std::filesystem::remove(path);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (BitVector{0, 1}));
  EXPECT_THROW(load_profile_file(path), Error);
}

}  // namespace
