#include <gtest/gtest.h>

#include <cmath>

#include "barron/errors.hpp"
#include "barron/rng.hpp"
#include "barron/sampler.hpp"
#include "barron/trainer.hpp"

namespace barron {
namespace {

Network constant_net(std::size_t d, double value, OutputActivation out = OutputActivation::identity) {
  DenseLayer h{Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(d)), Eigen::VectorXd::Zero(1)};
  DenseLayer o{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, value)};
  return Network({h, o}, out);
}

LabeledDataset balanced_line_data(std::size_t n, std::uint64_t seed) {
  // Separable in 2-D: label 1 iff x_0 + x_1 <= 1, with a gap of 0.1.
  LabeledDataset ds(2);
  ds.points.resize(2, static_cast<Eigen::Index>(n));
  CounterRng rng(seed);
  std::size_t i = 0;
  while (i < n) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    if (std::abs(a + b - 1.0) < 0.1) continue;
    ds.points(0, static_cast<Eigen::Index>(i)) = a;
    ds.points(1, static_cast<Eigen::Index>(i)) = b;
    ds.labels.push_back(a + b <= 1.0 ? 1 : 0);
    ++i;
  }
  return ds;
}

TEST(Loss, HingeExamples) {
  EXPECT_DOUBLE_EQ(hinge_loss(1.0, 1), 0.0);
  EXPECT_DOUBLE_EQ(hinge_loss(0.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(hinge_loss(0.5, 0), 1.0);
}

TEST(Loss, ZeroOneExamples) {
  EXPECT_EQ(zero_one_loss(0.5, 1), 0);
  EXPECT_EQ(zero_one_loss(0.49, 1), 1);
  EXPECT_EQ(zero_one_loss(0.49, 0), 0);
  EXPECT_EQ(zero_one_loss(0.5, 0), 1);
}

TEST(Loss, DominationAndSymmetryOnGrid) {
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    for (const int y : {0, 1}) {
      ASSERT_LE(zero_one_loss(x, y), hinge_loss(x, y));
      ASSERT_NEAR(hinge_loss(x, y), hinge_loss(1.0 - x, 1 - y), 1e-14);
    }
  }
}

TEST(Risk, ConstantHalfNet) {
  const auto ds = sphere_shell_dataset(3, 1000, 1);
  const Network half = constant_net(3, 0.5);
  EXPECT_DOUBLE_EQ(empirical_risk(half, ds, Loss::hinge), 1.0);
  EXPECT_DOUBLE_EQ(empirical_risk(half, ds, Loss::zero_one), 0.5);
  const auto both = evaluate_risks(half, ds);
  EXPECT_DOUBLE_EQ(both.hinge, 1.0);
  EXPECT_DOUBLE_EQ(both.zero_one, 0.5);
}

TEST(Risk, EmptyDatasetThrows) {
  LabeledDataset empty(3);
  EXPECT_THROW(empirical_risk(constant_net(3, 0.5), empty, Loss::hinge), SizeError);
}

TEST(Gradient, ZeroWhenLossIsZero) {
  // sigmoid(50) rounds to exactly 1.0, so every label-1 point has zero loss.
  const Network net = constant_net(2, 50.0, OutputActivation::sigmoid);
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(2, 5, 0.3);
  const std::vector<int> y(5, 1);
  const auto g = backprop_grad(net, X, y);
  EXPECT_EQ(g.loss, 0.0);
  for (const auto& w : g.grad.weights) EXPECT_EQ(w.norm(), 0.0);
  for (const auto& b : g.grad.bias) EXPECT_EQ(b.norm(), 0.0);
}

TEST(Gradient, SingleNeuronClosedForm) {
  // One hidden ReLU unit z = w x + b (active), output s = sigmoid(v z + c).
  // Loss 2|s - y|; for y = 1: dL/dv = -2 s (1 - s) z.
  DenseLayer h{Eigen::MatrixXd::Constant(1, 1, 0.7), Eigen::VectorXd::Constant(1, 0.1)};
  DenseLayer o{Eigen::MatrixXd::Constant(1, 1, -0.4), Eigen::VectorXd::Constant(1, 0.2)};
  const Network net({h, o}, OutputActivation::sigmoid);
  Eigen::MatrixXd X(1, 1);
  X << 0.5;
  const std::vector<int> y{1};
  const auto g = backprop_grad(net, X, y);
  const double z = 0.7 * 0.5 + 0.1;
  const double s = sigmoid(-0.4 * z + 0.2);
  const double ds = -2.0 * s * (1.0 - s);
  EXPECT_NEAR(g.loss, 2.0 * (1.0 - s), 1e-15);
  EXPECT_NEAR(g.grad.weights[1](0, 0), ds * z, 1e-15);
  EXPECT_NEAR(g.grad.bias[1](0), ds, 1e-15);
  EXPECT_NEAR(g.grad.weights[0](0, 0), ds * -0.4 * 0.5, 1e-15);
  EXPECT_NEAR(g.grad.bias[0](0), ds * -0.4, 1e-15);
}

TEST(Gradient, MatchesFiniteDifferencesOn50Nets) {
  CounterRng rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t depth = 1 + rng.below(4);
    std::vector<std::size_t> arch{1 + rng.below(8)};
    for (std::size_t l = 0; l < depth; ++l) arch.push_back(1 + rng.below(8));
    arch.push_back(1);
    Network net = init_network(arch, rng());
    std::vector<DenseLayer> layers = net.layers();
    for (auto& layer : layers) {
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = 0.2 * (2.0 * rng.uniform() - 1.0);
    }
    net = Network(layers, OutputActivation::sigmoid);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(arch.front()), 16);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = rng.uniform();
    }
    std::vector<int> y;
    for (int j = 0; j < 16; ++j) y.push_back(static_cast<int>(rng.below(2)));
    const auto check = check_gradient(net, X, y);
    worst = std::max(worst, check.max_rel_error);
    EXPECT_LE(check.max_rel_error, 1e-5) << "net " << t;
  }
  RecordProperty("max_rel_error", std::to_string(worst));
}

TEST(Adam, ZeroGradientLeavesParameters) {
  const Network net = init_network(std::vector<std::size_t>{3, 4, 1}, 5);
  std::vector<DenseLayer> layers = net.layers();
  Gradients zero;
  for (const auto& l : layers) {
    zero.weights.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    zero.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  AdamState st;
  for (int i = 0; i < 10; ++i) adam_step(layers, zero, 1e-2, st);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    EXPECT_EQ(layers[l].weights, net.layers()[l].weights);
    EXPECT_EQ(layers[l].bias, net.layers()[l].bias);
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps).
  std::vector<DenseLayer> layers{{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)}};
  Gradients g{{Eigen::MatrixXd::Constant(1, 1, 0.3)}, {Eigen::VectorXd::Constant(1, -2.0)}};
  AdamState st;
  adam_step(layers, g, 0.01, st);
  EXPECT_NEAR(layers[0].weights(0, 0), 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(layers[0].bias(0), 0.01 * 2.0 / (2.0 + 1e-8), 1e-15);
}

TEST(Train, ZeroEpochsReturnsInput) {
  const Network net = init_network(std::vector<std::size_t>{2, 4, 1}, 3);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  const auto res = train(net, balanced_line_data(50, 1), cfg);
  EXPECT_EQ(res.epochs_run, 0U);
  for (std::size_t l = 0; l < net.num_layers(); ++l) EXPECT_EQ(res.net.layers()[l].weights, net.layers()[l].weights);
}

TEST(Train, SeparableDataReachesZeroTrainingError) {
  const auto ds = balanced_line_data(400, 7);
  const Network net = init_network(std::vector<std::size_t>{2, 16, 8, 1}, 11);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.max_epochs = 2000;
  cfg.patience = 50;
  cfg.seed = 3;
  const auto res = train(net, ds, cfg);
  EXPECT_EQ(empirical_risk(res.net, ds, Loss::zero_one), 0.0);
  EXPECT_LT(res.final_loss, 0.1);
}

TEST(Train, BitwiseDeterministic) {
  const auto ds = balanced_line_data(300, 2);
  const Network net = init_network(std::vector<std::size_t>{2, 8, 4, 1}, 4);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 30;
  cfg.batch_size = 32;
  cfg.seed = 9;
  const auto a = train(net, ds, cfg);
  const auto b = train(net, ds, cfg);
  EXPECT_EQ(a.epochs_run, b.epochs_run);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    EXPECT_EQ(a.net.layers()[l].weights, b.net.layers()[l].weights);
    EXPECT_EQ(a.net.layers()[l].bias, b.net.layers()[l].bias);
  }
}

TEST(Train, EarlyStoppingWithPatience) {
  // A constant net's loss cannot change under a zero-width step, so patience 1
  // stops after the second epoch.
  const auto ds = balanced_line_data(64, 3);
  const Network net = constant_net(2, 50.0, OutputActivation::sigmoid);
  TrainConfig cfg;
  cfg.max_epochs = 100;
  cfg.patience = 1;
  const auto res = train(net, ds, cfg);
  EXPECT_TRUE(res.early_stopped);
  EXPECT_LE(res.epochs_run, 3U);
}

TEST(Train, RejectsBadConfig) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.learning_rate = 1e-3;
  cfg.patience = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Train, BatchDefaults) {
  TrainConfig cfg;
  EXPECT_EQ(cfg.effective_batch(4096), 4096U);
  EXPECT_EQ(cfg.effective_batch(4097), 1024U);
  cfg.batch_size = 64;
  EXPECT_EQ(cfg.effective_batch(10), 10U);
  EXPECT_EQ(cfg.effective_batch(1000), 64U);
}

TEST(Arch, ExperimentArchitecture) {
  EXPECT_EQ(experiment_arch(3, 1000, 2.0), (std::vector<std::size_t>{3, 96, 64, 32, 1}));
  EXPECT_EQ(experiment_arch(7, 1, 0.5), (std::vector<std::size_t>{7, 3, 2, 1, 1}));
  // 499^(2/2.1) = 371.2099 (high-precision oracle), so N = 372.
  EXPECT_EQ(experiment_arch(50, 499, 0.1), (std::vector<std::size_t>{50, 1116, 744, 372, 1}));
  EXPECT_EQ(experiment_width(10323, 5.0), 15U);
  EXPECT_EQ(experiment_width(499, 0.644), 110U);
}

}  // namespace
}  // namespace barron
