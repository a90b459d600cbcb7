#include "barron/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "barron/errors.hpp"
#include "barron/rng.hpp"

namespace barron {

namespace {

constexpr double kOuterRadius = 4.0;
constexpr double kInnerRadius = 2.0;

const std::vector<std::size_t> kG1 = {499,  730,   1065,  1556,  2271,  3317,  4843,
                                      7071, 10323, 15073, 22007, 32130, 46911, 68492};
const std::vector<std::size_t> kG2 = {249,  321,  414,  533,  687,  885,  1140, 1468,
                                      1890, 2435, 3135, 4038, 5200, 6696, 8624};

// Uniform-by-volume radius on [lo, hi] within a d-ball, via the inverse CDF
// of r^d written relative to hi so 4^784 never appears.
double shell_radius(double lo, double hi, std::size_t d, double u) {
  const double dd = static_cast<double>(d);
  const double base = std::pow(lo / hi, dd);
  return hi * std::pow(base + u * (1.0 - base), 1.0 / dd);
}

}  // namespace

void MarginConfig::validate() const {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(c_d > 0.0 && c_d <= 0.5)) throw ParameterError("c_d must lie in (0, 1/2]");
}

double default_neighborhood_radius(std::size_t d) {
  if (d == 784) return 0.49999972;
  return 0.48;
}

LabeledDataset sphere_shell_dataset(std::size_t d, std::size_t n, std::uint64_t seed) {
  if (d < 2) throw ParameterError("sphere_shell_dataset: d must be >= 2");
  LabeledDataset ds(d);
  ds.points.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  ds.labels.resize(n);
  ds.distances.resize(n);
  ds.meta.seed = seed;
  CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const bool inner = (i % 2 == 0);
    auto col = ds.points.col(static_cast<Eigen::Index>(i));
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double g = std::abs(rng.normal());
        col(static_cast<Eigen::Index>(j)) = g;
        norm2 += g * g;
      }
    } while (!(norm2 > 0.0));
    const double r = inner ? shell_radius(0.0, kInnerRadius, d, rng.uniform())
                           : shell_radius(kInnerRadius, kOuterRadius, d, 1.0 - rng.uniform());
    col *= (r / kOuterRadius) / std::sqrt(norm2);
    col = col.cwiseMin(1.0);
    ds.labels[i] = inner ? 1 : 0;
    ds.distances[i] = std::abs(kSphereRadius - col.norm());
  }
  return ds;
}

std::pair<LabeledDataset, LabeledDataset> sphere_shell_sample(std::size_t d, std::size_t n_train,
                                                               std::size_t n_test, std::uint64_t seed) {
  auto train = sphere_shell_dataset(d, n_train, derive_seed({seed, 0x747261696eULL}));
  auto test = sphere_shell_dataset(d, n_test, derive_seed({seed, 0x74657374ULL}));
  train.meta = {0.0, seed, "train"};
  test.meta = {0.0, seed, "test"};
  return {std::move(train), std::move(test)};
}

double margin_keep_probability(double dist, double gamma, double c_d) {
  if (dist > c_d) return 1.0;
  return std::pow(std::max(dist, 0.0) / c_d, gamma);
}

LabeledDataset margin_reject(const LabeledDataset& ds, const MarginConfig& cfg) {
  cfg.validate();
  if (!ds.has_distances()) throw ParameterError("margin_reject needs distances");
  std::vector<std::size_t> kept;
  kept.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CounterRng rng(derive_seed({cfg.seed, i}));
    if (rng.uniform() < margin_keep_probability(ds.distances[i], cfg.gamma, cfg.c_d)) kept.push_back(i);
  }
  auto out = ds.select(kept);
  out.meta.gamma = cfg.gamma;
  return out;
}

LabeledDataset subsample(const LabeledDataset& ds, std::size_t n, std::uint64_t seed) {
  if (n > ds.size()) {
    throw SizeError("subsample: requested " + std::to_string(n) + " of " + std::to_string(ds.size()) + " points");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i] ? 1 : 0].push_back(i);

  const std::size_t total = ds.size();
  std::size_t take1 = total == 0 ? 0
                                 : static_cast<std::size_t>(std::llround(static_cast<double>(n) *
                                                                         static_cast<double>(by_class[1].size()) /
                                                                         static_cast<double>(total)));
  take1 = std::min(take1, by_class[1].size());
  if (n - take1 > by_class[0].size()) take1 = n - by_class[0].size();
  const std::size_t take[2] = {n - take1, take1};

  CounterRng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  for (int c = 0; c < 2; ++c) {
    auto& pool = by_class[c];
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < take[c]; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
      std::swap(pool[k], pool[j]);
      chosen.push_back(pool[k]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return ds.select(chosen);
}

SizeGrid size_grid(std::size_t d) {
  switch (d) {
    case 3: {
      auto g = kG1;
      g.push_back(120001);
      return {g, 399644};
    }
    case 50: {
      auto g = kG1;
      g.push_back(120088);
      return {g, 399187};
    }
    case 784:
      return {kG2, 4837};
    default:
      throw ConfigError("no built-in size grid for d = " + std::to_string(d) + "; supply sizes explicitly");
  }
}

}  // namespace barron
