#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "barron/errors.hpp"
#include "barron/geometry.hpp"
#include "barron/sampler.hpp"

namespace barron {
namespace {

TEST(ShellSample, PointsInOrthantBall) {
  for (const std::size_t d : {2U, 3U, 50U}) {
    const auto ds = sphere_shell_dataset(d, 1001, 4);
    ds.validate();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto x = ds.points.col(static_cast<Eigen::Index>(i));
      ASSERT_GE(x.minCoeff(), 0.0);
      ASSERT_LE(x.norm(), 1.0 + 1e-15);
      const double r = x.norm();
      ASSERT_EQ(ds.labels[i], r <= 0.5 ? 1 : 0);
      ASSERT_NEAR(ds.distances[i], std::abs(0.5 - r), 1e-15);
    }
  }
}

TEST(ShellSample, ExactHalfPerShell) {
  const auto ds = sphere_shell_dataset(3, 1001, 9);
  const auto ones = ds.count_label(1);
  const auto zeros = ds.count_label(0);
  EXPECT_EQ(ones + zeros, 1001U);
  EXPECT_LE(std::max(ones, zeros) - std::min(ones, zeros), 1U);
}

TEST(ShellSample, TrainAndTestDiffer) {
  const auto [train, test] = sphere_shell_sample(3, 100, 100, 1);
  EXPECT_EQ(train.size(), 100U);
  EXPECT_EQ(test.size(), 100U);
  EXPECT_NE(train.points, test.points);
}

TEST(ShellSample, InnerShellIsVolumeUniform) {
  // P(||x|| <= r/2 | inner shell) = (r/2 / (1/2))^d for uniform volume.
  const std::size_t d = 3;
  const auto ds = sphere_shell_dataset(d, 200000, 21);
  std::size_t inner = 0;
  std::size_t small = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] != 1) continue;
    ++inner;
    if (ds.points.col(static_cast<Eigen::Index>(i)).norm() <= 0.25) ++small;
  }
  const double p = static_cast<double>(small) / static_cast<double>(inner);
  EXPECT_NEAR(p, 0.125, 4 * std::sqrt(0.125 * 0.875 / static_cast<double>(inner)));
}

TEST(MarginReject, KeepProbabilityExamples) {
  EXPECT_DOUBLE_EQ(margin_keep_probability(0.48, 2.0, 0.48), 1.0);
  EXPECT_DOUBLE_EQ(margin_keep_probability(0.0, 2.0, 0.48), 0.0);
  EXPECT_DOUBLE_EQ(margin_keep_probability(0.24, 1.0, 0.48), 0.5);
  EXPECT_DOUBLE_EQ(margin_keep_probability(0.49, 1.0, 0.48), 1.0);
}

TEST(MarginReject, HalfDistanceKeptHalfTheTime) {
  LabeledDataset ds(2);
  const std::size_t n = 40000;
  ds.points = Eigen::MatrixXd::Constant(2, static_cast<Eigen::Index>(n), 0.1);
  ds.labels.assign(n, 1);
  ds.distances.assign(n, 0.24);
  const auto kept = margin_reject(ds, MarginConfig{1.0, 0.48, 77});
  const double frac = static_cast<double>(kept.size()) / static_cast<double>(n);
  EXPECT_NEAR(frac, 0.5, 4 * std::sqrt(0.25 / static_cast<double>(n)));
}

TEST(MarginReject, LargeGammaIsAlmostHardThreshold) {
  // Keep probability (dist/c_d)^100: ~0 below 0.1 c_d, ~1 just under c_d.
  const auto ds = sphere_shell_dataset(3, 50000, 3);
  const auto kept = margin_reject(ds, MarginConfig{100.0, 0.48, 3});
  EXPECT_LE(kept.size(), ds.size());
  auto count = [](const LabeledDataset& s, double lo, double hi) {
    std::size_t c = 0;
    for (const double dist : s.distances) c += dist > lo && dist <= hi;
    return c;
  };
  ASSERT_GT(count(ds, 0.0, 0.048), 0U);
  EXPECT_EQ(count(kept, 0.0, 0.048), 0U);
  // Beyond c_d nothing is removed.
  EXPECT_EQ(count(kept, 0.48, 1.0), count(ds, 0.48, 1.0));
  // Within 0.1% of c_d about 90% survive ((0.999)^100 ~ 0.905).
  const auto edge = count(ds, 0.999 * 0.48, 0.48);
  ASSERT_GT(edge, 10U);
  EXPECT_GE(static_cast<double>(count(kept, 0.999 * 0.48, 0.48)), 0.5 * static_cast<double>(edge));
}

TEST(MarginReject, Deterministic) {
  const auto ds = sphere_shell_dataset(3, 5000, 8);
  const auto a = margin_reject(ds, MarginConfig{2.278, 0.48, 5});
  const auto b = margin_reject(ds, MarginConfig{2.278, 0.48, 5});
  std::stringstream sa;
  std::stringstream sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(MarginReject, RetainedSlopeAtLeastGamma) {
  const auto ds = sphere_shell_dataset(3, 100000, 14);
  const auto eps = log_grid(1e-3, 1e-1, 10);
  for (const double g : {1.189, 2.822}) {
    const auto kept = margin_reject(ds, MarginConfig{g, 0.48, 6});
    const double slope = fit_margin_exponent(eps, empirical_margin_masses(kept, eps));
    EXPECT_GE(slope, g - 0.3) << "gamma " << g;
  }
}

TEST(MarginReject, NeedsDistances) {
  auto ds = sphere_shell_dataset(2, 10, 1);
  ds.distances.clear();
  EXPECT_THROW(margin_reject(ds, MarginConfig{1.0, 0.48, 1}), ParameterError);
  EXPECT_THROW(MarginConfig({1.0, 0.6, 1}).validate(), ParameterError);
}

TEST(Subsample, SizesAndBalance) {
  const auto ds = sphere_shell_dataset(3, 3000, 2);
  EXPECT_EQ(subsample(ds, 0, 1).size(), 0U);
  const auto all = subsample(ds, ds.size(), 1);
  EXPECT_EQ(all.size(), ds.size());
  const auto s = subsample(ds, 499, 1);
  EXPECT_EQ(s.size(), 499U);
  const double share = static_cast<double>(ds.count_label(1)) / static_cast<double>(ds.size());
  EXPECT_LE(std::abs(static_cast<double>(s.count_label(1)) - share * 499.0), 1.0);
  EXPECT_THROW(subsample(ds, ds.size() + 1, 1), SizeError);
}

TEST(Subsample, NoDuplicates) {
  const auto ds = sphere_shell_dataset(2, 1000, 2);
  const auto s = subsample(ds, 600, 3);
  for (Eigen::Index i = 1; i < s.points.cols(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) ASSERT_NE(s.points.col(i), s.points.col(j));
  }
}

TEST(SizeGrid, PaperGrids) {
  const auto g3 = size_grid(3);
  EXPECT_EQ(g3.train.front(), 499U);
  EXPECT_EQ(g3.train.back(), 120001U);
  EXPECT_EQ(g3.train.size(), 15U);
  EXPECT_EQ(g3.test, 399644U);
  const auto g50 = size_grid(50);
  EXPECT_EQ(g50.train.back(), 120088U);
  EXPECT_EQ(g50.test, 399187U);
  const auto g784 = size_grid(784);
  EXPECT_EQ(g784.train.front(), 249U);
  EXPECT_EQ(g784.train.back(), 8624U);
  EXPECT_EQ(g784.test, 4837U);
  EXPECT_THROW(size_grid(4), ConfigError);
}

TEST(Radius, DefaultsByDimension) {
  EXPECT_DOUBLE_EQ(default_neighborhood_radius(3), 0.48);
  EXPECT_DOUBLE_EQ(default_neighborhood_radius(50), 0.48);
  EXPECT_DOUBLE_EQ(default_neighborhood_radius(784), 0.49999972);
}

}  // namespace
}  // namespace barron
