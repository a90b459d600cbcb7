#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "barron/dataset.hpp"

namespace barron {

/// Margin exponents swept by the synthetic experiments.
inline const std::vector<double> kGammaGrid = {0.1,   0.644, 1.189, 1.733, 2.278,
                                               2.822, 3.367, 3.911, 4.456, 5.0};

/// Radius of the separating sphere after rescaling by 1/4.
inline constexpr double kSphereRadius = 0.5;

struct MarginConfig {
  double gamma = 1.0;
  double c_d = 0.48;   // neighborhood radius
  std::uint64_t seed = 0;

  void validate() const;
};

/// 0.48 for d in {3, 50}; 0.5 - 2.8e-7 for d = 784; 0.48 otherwise.
double default_neighborhood_radius(std::size_t d);

/// Balanced sphere-shell sample in the positive orthant. Half of the points
/// are uniform (by volume) in the inner ball ||x|| <= 2, half in the shell
/// 2 < ||x|| <= 4; everything is then divided by 4. Label 1 iff ||x|| <= 1/2,
/// dist = |1/2 - ||x|||. Inner points get ceil(n/2), outer floor(n/2).
LabeledDataset sphere_shell_dataset(std::size_t d, std::size_t n, std::uint64_t seed);

/// Train and test sets drawn from independent streams of `seed`.
std::pair<LabeledDataset, LabeledDataset> sphere_shell_sample(std::size_t d, std::size_t n_train,
                                                               std::size_t n_test, std::uint64_t seed);

/// Probability of keeping a point: 1 beyond c_d, else (dist/c_d)^gamma.
double margin_keep_probability(double dist, double gamma, double c_d);

/// Independent thinning: point i is removed with probability
/// 1 - margin_keep_probability, decided by the stream derive_seed({seed, i}).
LabeledDataset margin_reject(const LabeledDataset& ds, const MarginConfig& cfg);

/// Uniform subset of size n without replacement, stratified by label so each
/// class count is within one of its proportional share. Original order kept.
LabeledDataset subsample(const LabeledDataset& ds, std::size_t n, std::uint64_t seed);

struct SizeGrid {
  std::vector<std::size_t> train;
  std::size_t test = 0;
};

/// Training sizes and test size used for d in {3, 50, 784}; ConfigError otherwise.
SizeGrid size_grid(std::size_t d);

}  // namespace barron
