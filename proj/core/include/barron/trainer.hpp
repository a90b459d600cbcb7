#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "barron/dataset.hpp"
#include "barron/net.hpp"

namespace barron {

/// Hinge loss for a score x in [0,1] and a label y in {0,1}:
/// max{0, 1 - (2y-1)(2x-1)}.
double hinge_loss(double x, int y) noexcept;

/// 1 iff the thresholded score disagrees with y. Scores >= 1/2 predict 1.
int zero_one_loss(double x, int y) noexcept;

enum class Loss { hinge, zero_one };

/// Mean loss of the network's outputs over the dataset.
double empirical_risk(const Network& net, const LabeledDataset& ds, Loss loss);

struct RiskPair {
  double hinge = 0.0;
  double zero_one = 0.0;
};

/// Both risks from a single forward pass.
RiskPair evaluate_risks(const Network& net, const LabeledDataset& ds);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> bias;
};

struct LossAndGradient {
  double loss = 0.0;
  Gradients grad;
};

/// Mean hinge loss over the batch (columns of `inputs`) and its gradient with
/// respect to every weight and bias. Requires a sigmoid output. Subgradients
/// at the hinge kink and at ReLU zero are taken as 0.
LossAndGradient backprop_grad(const Network& net, const Eigen::MatrixXd& inputs, std::span<const int> labels);
LossAndGradient backprop_grad(const Network& net, const LabeledDataset& batch);

/// Parameters drawn from U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
};

/// Compares backprop_grad with central differences of the mean hinge loss.
/// Per-parameter error is |g - fd| / max(|g|, |fd|, 1e-4).
GradientCheck check_gradient(const Network& net, const Eigen::MatrixXd& inputs, std::span<const int> labels,
                             double h = 1e-6);

Network init_network(std::span<const std::size_t> architecture, std::uint64_t seed,
                     OutputActivation output = OutputActivation::sigmoid);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;
  Gradients m;
  Gradients v;
};

/// One Adam update in place.
void adam_step(std::vector<DenseLayer>& layers, const Gradients& grad, double learning_rate, AdamState& state);

struct TrainConfig {
  double learning_rate = 1e-5;
  std::size_t max_epochs = 50000;
  std::size_t patience = 1;
  double min_delta = 0.0;
  std::size_t batch_size = 0;   // 0: full batch up to 4096 points, else 1024
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t effective_batch(std::size_t n) const;
};

/// Single-core settings: lr 1e-3, at most 300 epochs, patience 10, batch 64.
TrainConfig desk_scale_config();

struct TrainResult {
  Network net;
  std::size_t epochs_run = 0;
  double final_loss = 0.0;
  bool early_stopped = false;
};

/// Adam on the mean hinge loss. After every epoch the mean of that epoch's
/// batch losses is compared with the best so far; `patience` epochs without
/// an improvement larger than `min_delta` stop training. Throws
/// TrainingError on a non-finite loss.
TrainResult train(const Network& net, const LabeledDataset& ds, const TrainConfig& cfg);

/// ceil(n^(2/(gamma+2))).
std::size_t experiment_width(std::size_t n, double gamma);
/// (d, 3N, 2N, N, 1) with N = experiment_width(n, gamma).
std::vector<std::size_t> experiment_arch(std::size_t d, std::size_t n, double gamma);

}  // namespace barron
