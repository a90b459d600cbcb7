#include <gtest/gtest.h>

#include <cmath>

#include "barron/construction.hpp"
#include "barron/errors.hpp"
#include "barron/geometry.hpp"
#include "barron/sampler.hpp"

namespace barron {
namespace {

TEST(Distance, SphereExamples) {
  const auto b = Boundary::sphere(0.5, 3);
  const double on1[] = {0.5, 0.0, 0.0};
  const double on2[] = {0.3, 0.4, 0.0};
  const double origin[] = {0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(dist_to_boundary(b, on1), 0.0);
  EXPECT_NEAR(dist_to_boundary(b, on2), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(dist_to_boundary(b, origin), 0.5);
}

TEST(Distance, AffineIsNormalised) {
  const auto b = Boundary::affine({0.0, 2.0}, -1.0);   // x_1 = 0.5
  const double x[] = {0.9, 0.8};
  EXPECT_NEAR(dist_to_boundary(b, x), 0.3, 1e-15);
  EXPECT_THROW(Boundary::affine({0.0, 0.0}, 1.0), ParameterError);
}

TEST(Distance, GraphUsesVerticalGap) {
  const AffineHorizon f{{0.2}, 0.4};
  CoverPiece p{{{0.0, 1.0}, {0.0, 1.0}}, {0, 1}, 1, Orientation::below, affine_approximant(f, 4), f, 0.0};
  const auto b = Boundary::graph(p);
  const double x[] = {0.5, 0.9};   // f = 0.5
  EXPECT_NEAR(dist_to_boundary(b, x), 0.4, 1e-15);
}

TEST(MarginMass, WholeCubeAndEmptyTube) {
  const auto s = uniform_cube_sampler(3);
  const auto b = Boundary::sphere(0.5, 3);
  const McOptions o{10000, 1, 1};
  EXPECT_DOUBLE_EQ(estimate_margin_mass(s, b, std::sqrt(3.0), o).estimate, 1.0);
  EXPECT_DOUBLE_EQ(estimate_margin_mass(s, b, 0.0, o).estimate, 0.0);
}

TEST(MarginMass, AffineStripArea) {
  const auto s = uniform_cube_sampler(2);
  const auto b = Boundary::affine({0.0, 1.0}, -0.5);
  const auto e = estimate_margin_mass(s, b, 0.1, {10000, 3, 1});
  EXPECT_NEAR(e.estimate, 0.2, 4 * e.std_error);
  EXPECT_GT(e.std_error, 0.0);
}

TEST(MarginMass, MonotoneInEps) {
  const auto s = uniform_cube_sampler(3);
  const auto b = Boundary::sphere(0.5, 3);
  double last = -1.0;
  for (const double eps : log_grid(1e-3, 0.5, 15)) {
    const double m = estimate_margin_mass(s, b, eps, {10000, 8, 1}).estimate;
    EXPECT_GE(m, last);
    last = m;
  }
}

TEST(MarginMass, IndependentOfWorkerCount) {
  const auto s = uniform_cube_sampler(3);
  const auto b = Boundary::sphere(0.5, 3);
  const auto one = estimate_margin_mass(s, b, 0.05, {50000, 4, 1});
  const auto four = estimate_margin_mass(s, b, 0.05, {50000, 4, 4});
  EXPECT_EQ(one.hits, four.hits);
  EXPECT_EQ(one.samples, 50000U);
}

TEST(TubeMass, Examples) {
  const auto s = uniform_cube_sampler(2);
  const auto half = [](std::span<const double>) { return 0.5; };
  const auto two = [](std::span<const double>) { return 2.0; };
  const auto band = estimate_tube_mass(s, half, 1, 0.25, {10000, 2, 1});
  EXPECT_NEAR(band.estimate, 0.5, 4 * band.std_error);
  EXPECT_DOUBLE_EQ(estimate_tube_mass(s, half, 1, 1.0, {10000, 2, 1}).estimate, 1.0);
  EXPECT_DOUBLE_EQ(estimate_tube_mass(s, two, 1, 0.5, {10000, 2, 1}).estimate, 0.0);
}

TEST(Disagreement, ExactAndComplement) {
  const AffineHorizon f{{0.0}, 0.5};
  ClassifierSpec spec;
  spec.c1 = 0.5;
  spec.width = 4;
  spec.pieces.push_back(
      CoverPiece{{{0.0, 1.0}, {0.0, 1.0}}, {0, 1}, 1, Orientation::below, affine_approximant(f, 4), f, 0.0});
  const auto label = [&](std::span<const double> x) { return indicator(spec, x); };
  const auto s = uniform_cube_sampler(2);

  // Step function x_1 <= 0.5 as a net cannot be exact, so compare against its
  // own thresholded labels: a constant net disagrees on exactly one class.
  DenseLayer h{Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1)};
  DenseLayer out{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1)};
  const Network one({h, out});
  const auto e = estimate_disagreement(one, label, s, {20000, 1, 1});
  EXPECT_NEAR(e.estimate, 0.5, 4 * e.std_error);

  const auto always_one = [](std::span<const double>) { return 1; };
  EXPECT_DOUBLE_EQ(estimate_disagreement(one, always_one, s, {5000, 1, 1}).estimate, 0.0);
  const auto always_zero = [](std::span<const double>) { return 0; };
  EXPECT_DOUBLE_EQ(estimate_disagreement(one, always_zero, s, {5000, 1, 1}).estimate, 1.0);
}

TEST(Disagreement, ConstructedWithinStripOracle) {
  // d=2, M=1, N=16, C1 = 0.2 so delta = 0.05. Disagreement is confined to the
  // delta strip below the boundary plus the deltahat frame of the cube:
  // area <= delta + 4 * deltahat.
  ClassifierSpec spec;
  spec.c1 = 0.2;
  spec.width = 16;
  const AffineHorizon f{{0.0}, 0.5};
  spec.pieces.push_back(
      CoverPiece{{{0.0, 1.0}, {0.0, 1.0}}, {0, 1}, 1, Orientation::below, affine_approximant(f, 16), f, 0.0});
  const Network net = build_classifier(spec);
  const auto e = estimate_disagreement(net, [&](std::span<const double> x) { return indicator(spec, x); },
                                       uniform_cube_sampler(2), {200000, 9, 1});
  const double dh = spec.deltahat();
  const double oracle = 0.05 + 4 * dh;
  EXPECT_LE(e.estimate, oracle + 3 * e.std_error);
  EXPECT_LE(e.estimate, 3.5 * 2 * 1 * 0.2 * 0.25 * 2 + 3 * e.std_error);
}

TEST(FitExponent, RegressionIdentity) {
  const auto eps = log_grid(1e-3, 1e-1, 10);
  for (const double p : {1.0, 2.0, 3.7}) {
    std::vector<double> m;
    for (const double e : eps) m.push_back(0.3 * std::pow(e, p));
    EXPECT_NEAR(fit_margin_exponent(eps, m), p, 1e-12);
  }
}

TEST(FitExponent, DropsNonPositiveAndNeedsTwo) {
  const std::vector<double> eps{0.01, 0.02, 0.04};
  EXPECT_NEAR(fit_margin_exponent(eps, std::vector<double>{0.0, 0.02, 0.04}), 1.0, 1e-12);
  EXPECT_THROW(fit_margin_exponent(eps, std::vector<double>{0.0, 0.0, 0.04}), FitError);
}

TEST(FitExponent, MarginRejectedUniformGammaOne) {
  // Uniform points in the unit square labelled by x_1 <= 1/2, rejected with
  // gamma = 1 around the line: retained density ~ dist, mass ~ eps^2.
  const std::size_t n = 200000;
  LabeledDataset ds(2);
  ds.points.resize(2, static_cast<Eigen::Index>(n));
  CounterRng rng(31);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    ds.points(0, static_cast<Eigen::Index>(i)) = x;
    ds.points(1, static_cast<Eigen::Index>(i)) = y;
    ds.labels.push_back(y <= 0.5 ? 1 : 0);
    ds.distances.push_back(std::abs(y - 0.5));
  }
  const auto kept = margin_reject(ds, MarginConfig{1.0, 0.48, 5});
  const auto eps = log_grid(1e-2, 1e-1, 8);
  const double slope = fit_margin_exponent(eps, empirical_margin_masses(kept, eps));
  EXPECT_GE(slope, 1.0 - 0.3);
  EXPECT_NEAR(slope, 2.0, 0.3);
}

TEST(LogGrid, Endpoints) {
  const auto g = log_grid(1e-3, 1e-1, 5);
  ASSERT_EQ(g.size(), 5U);
  EXPECT_NEAR(g.front(), 1e-3, 1e-18);
  EXPECT_NEAR(g.back(), 1e-1, 1e-15);
  EXPECT_NEAR(g[2], 1e-2, 1e-15);
}

}  // namespace
}  // namespace barron
