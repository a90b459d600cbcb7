#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "barron/dataset.hpp"
#include "barron/net.hpp"
#include "barron/trainer.hpp"

namespace barron {

inline constexpr std::size_t kMnistDim = 784;

/// Reads an IDX image/label pair and keeps digits 0 and 1. Pixels are
/// divided by 255.
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Grows each class to ceil(1.95 * larger class) with SMOTE interpolation
/// towards one of the k nearest same-class neighbours. Originals are kept and
/// come first within each class.
LabeledDataset smote_balance(const LabeledDataset& ds, std::size_t k, std::uint64_t seed);

std::vector<std::size_t> pilot_architecture();
TrainConfig pilot_config(std::uint64_t seed);

/// Trains the (784,256,128,64,1) sigmoid pilot with hinge loss.
Network fit_pilot(const LabeledDataset& ds, const TrainConfig& cfg);

struct Thresholds {
  double ell = 0.0;
  double u = 0.0;
  std::size_t k = 0;   // points expected inside [ell, u]
};

/// Chooses ell and u so that [ell, u] holds ceil(0.001 * count) outputs:
/// half from the top of class 0, the rest from the bottom of class 1. Class 0
/// outputs must lie strictly below class 1 outputs (misclassified points are
/// removed beforehand).
Thresholds calibrate_thresholds(std::span<const double> w, std::span<const int> labels);

struct ProxyDistanceModel {
  Network pilot = zero_network(pilot_architecture(), OutputActivation::sigmoid);
  double ell = 0.0;
  double u = 0.0;
  double w_min = 0.0;
  double w_max = 1.0;

  void validate() const;
};

/// Piecewise-linear map sending w_min, [ell, u], w_max to 0, 1/2, 1. Values
/// outside [w_min, w_max] are clamped with a warning.
double rescale_map(double w, const ProxyDistanceModel& model);
double proxy_distance(std::span<const double> x, const ProxyDistanceModel& model);

struct MnistPrepOptions {
  std::size_t smote_k = 5;
  std::uint64_t seed = 0;
  TrainConfig pilot;   // seed is overridden from `seed`
};

struct MnistPrepStats {
  std::size_t loaded = 0;
  std::size_t class0_after_smote = 0;
  std::size_t class1_after_smote = 0;
  std::size_t misclassified = 0;
  std::size_t trimmed = 0;
  std::size_t expected_trim = 0;
  std::size_t balanced_drop = 0;
  double pilot_accuracy = 0.0;
};

struct MnistPrepResult {
  LabeledDataset train;
  LabeledDataset test;
  ProxyDistanceModel model;
  MnistPrepStats train_stats;
  MnistPrepStats test_stats;
};

/// Full d=784 data path: SMOTE, pilot, well-predicted filter, [ell,u]
/// trimming, class equalisation and proxy distances. The test split reuses the
/// pilot and thresholds fitted on the training split.
MnistPrepResult mnist_prepare(const LabeledDataset& train_raw, const LabeledDataset& test_raw,
                              const MnistPrepOptions& opts);

}  // namespace barron
