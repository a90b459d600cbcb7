#include <gtest/gtest.h>

#include <set>

#include "barron/rng.hpp"

namespace barron {
namespace {

TEST(Rng, SameKeySameStream) {
  CounterRng a(42);
  CounterRng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, StreamIsPureFunctionOfCounter) {
  CounterRng a(7);
  for (int i = 0; i < 10; ++i) a();
  CounterRng b(7, 10);
  EXPECT_EQ(a(), b());
}

TEST(Rng, DeriveSeedIsOrderSensitive) {
  EXPECT_NE(derive_seed({1, 2}), derive_seed({2, 1}));
  EXPECT_EQ(derive_seed({1, 2, 3}), derive_seed({1, 2, 3}));
  EXPECT_NE(derive_seed({0}), derive_seed({0, 0}));
}

TEST(Rng, UniformInUnitInterval) {
  CounterRng r(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowCoversRangeOnly) {
  CounterRng r(5);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7U);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7U);
}

TEST(Rng, NormalMoments) {
  CounterRng r(11);
  double s = 0.0;
  double s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  CounterRng a(9);
  CounterRng b(9);
  (void)a.split(1);
  EXPECT_EQ(a(), b());
  EXPECT_NE(a.split(1)(), a.split(2)());
}

}  // namespace
}  // namespace barron
