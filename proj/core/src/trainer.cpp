#include "barron/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "barron/errors.hpp"
#include "barron/rng.hpp"

namespace barron {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Forward pass keeping pre-activations; returns sigmoid outputs (1 x B).
struct Tape {
  std::vector<Eigen::MatrixXd> pre;    // z_l
  std::vector<Eigen::MatrixXd> post;   // a_l, post[0] = input
};

Eigen::RowVectorXd forward_tape(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& inputs,
                                Tape& tape) {
  tape.pre.resize(layers.size());
  tape.post.resize(layers.size());
  tape.post[0] = inputs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    tape.pre[l].noalias() = layers[l].weights * tape.post[l];
    tape.pre[l].colwise() += layers[l].bias;
    if (l + 1 < layers.size()) tape.post[l + 1] = tape.pre[l].cwiseMax(0.0);
  }
  return tape.pre.back().row(0).unaryExpr([](double z) { return sigmoid(z); });
}

LossAndGradient loss_and_grad(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& inputs,
                              std::span<const int> labels, Tape& tape) {
  const auto batch = inputs.cols();
  if (static_cast<std::size_t>(batch) != labels.size()) throw ShapeError("batch and label counts differ");
  if (batch == 0) throw SizeError("empty batch");
  const Eigen::RowVectorXd s = forward_tape(layers, inputs, tape);

  LossAndGradient out;
  Eigen::MatrixXd delta(1, batch);
  double total = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (Eigen::Index k = 0; k < batch; ++k) {
    const int y = labels[static_cast<std::size_t>(k)];
    const double h = hinge_loss(s(k), y);
    total += h;
    const double dh_ds = h > 0.0 ? -2.0 * (2.0 * y - 1.0) : 0.0;
    delta(0, k) = inv_b * dh_ds * s(k) * (1.0 - s(k));
  }
  out.loss = total * inv_b;

  const std::size_t depth = layers.size();
  out.grad.weights.resize(depth);
  out.grad.bias.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    out.grad.weights[l].noalias() = delta * tape.post[l].transpose();
    out.grad.bias[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layers[l].weights.transpose() * delta;
      delta = back.cwiseProduct((tape.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return out;
}

Eigen::MatrixXd gather(const LabeledDataset& ds, std::span<const std::size_t> order, std::size_t begin,
                       std::size_t end, std::vector<int>& labels) {
  Eigen::MatrixXd x(idx(ds.d), idx(end - begin));
  labels.resize(end - begin);
  for (std::size_t k = begin; k < end; ++k) {
    x.col(idx(k - begin)) = ds.points.col(idx(order[k]));
    labels[k - begin] = ds.labels[order[k]];
  }
  return x;
}

}  // namespace

double hinge_loss(double x, int y) noexcept {
  return std::max(0.0, 1.0 - (2.0 * y - 1.0) * (2.0 * x - 1.0));
}

int zero_one_loss(double x, int y) noexcept {
  const int predicted = x >= 0.5 ? 1 : 0;
  return predicted != y ? 1 : 0;
}

RiskPair evaluate_risks(const Network& net, const LabeledDataset& ds) {
  if (ds.empty()) throw SizeError("empirical risk of an empty dataset");
  if (ds.d != net.input_dim()) throw ShapeError("dataset and network dimensions differ");
  RiskPair r;
  constexpr std::size_t kChunk = 8192;
  for (std::size_t begin = 0; begin < ds.size(); begin += kChunk) {
    const std::size_t len = std::min(kChunk, ds.size() - begin);
    const Eigen::MatrixXd out = net.forward_batch(ds.points.middleCols(idx(begin), idx(len)));
    for (std::size_t k = 0; k < len; ++k) {
      const double x = out(0, idx(k));
      r.hinge += hinge_loss(x, ds.labels[begin + k]);
      r.zero_one += zero_one_loss(x, ds.labels[begin + k]);
    }
  }
  r.hinge /= static_cast<double>(ds.size());
  r.zero_one /= static_cast<double>(ds.size());
  return r;
}

double empirical_risk(const Network& net, const LabeledDataset& ds, Loss loss) {
  const auto r = evaluate_risks(net, ds);
  return loss == Loss::hinge ? r.hinge : r.zero_one;
}

LossAndGradient backprop_grad(const Network& net, const Eigen::MatrixXd& inputs, std::span<const int> labels) {
  if (net.output_activation() != OutputActivation::sigmoid) {
    throw ParameterError("backprop_grad expects a sigmoid output");
  }
  if (net.output_dim() != 1) throw ShapeError("backprop_grad expects one output");
  if (static_cast<std::size_t>(inputs.rows()) != net.input_dim()) throw ShapeError("batch dimension mismatch");
  Tape tape;
  return loss_and_grad(net.layers(), inputs, labels, tape);
}

LossAndGradient backprop_grad(const Network& net, const LabeledDataset& batch) {
  return backprop_grad(net, batch.points, batch.labels);
}

GradientCheck check_gradient(const Network& net, const Eigen::MatrixXd& inputs, std::span<const int> labels,
                             double h) {
  const auto analytic = backprop_grad(net, inputs, labels);
  auto loss_at = [&](const std::vector<DenseLayer>& layers) {
    const Network probe(layers, OutputActivation::sigmoid);
    const Eigen::MatrixXd out = probe.forward_batch(inputs);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < out.cols(); ++j) sum += hinge_loss(out(0, j), labels[static_cast<std::size_t>(j)]);
    return sum / static_cast<double>(out.cols());
  };
  GradientCheck res;
  std::vector<DenseLayer> layers = net.layers();
  auto probe_param = [&](double& p, double g) {
    const double saved = p;
    p = saved + h;
    const double up = loss_at(layers);
    p = saved - h;
    const double down = loss_at(layers);
    p = saved;
    const double fd = (up - down) / (2.0 * h);
    const double rel = std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-4});
    res.max_rel_error = std::max(res.max_rel_error, rel);
    ++res.parameters;
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& w = layers[l].weights;
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) probe_param(w(r, c), analytic.grad.weights[l](r, c));
    }
    auto& b = layers[l].bias;
    for (Eigen::Index r = 0; r < b.size(); ++r) probe_param(b(r), analytic.grad.bias[l](r));
  }
  return res;
}

Network init_network(std::span<const std::size_t> architecture, std::uint64_t seed, OutputActivation output) {
  if (architecture.size() < 2) throw ShapeError("architecture needs at least input and output");
  CounterRng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < architecture.size(); ++l) {
    const std::size_t fan_in = architecture[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer layer{Eigen::MatrixXd(idx(architecture[l + 1]), idx(fan_in)),
                     Eigen::VectorXd::Zero(idx(architecture[l + 1]))};
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        layer.weights(r, c) = limit * (2.0 * rng.uniform() - 1.0);
      }
    }
    layers.push_back(std::move(layer));
  }
  return Network(std::move(layers), output);
}

void adam_step(std::vector<DenseLayer>& layers, const Gradients& grad, double learning_rate, AdamState& st) {
  if (st.m.weights.empty()) {
    for (const auto& layer : layers) {
      st.m.weights.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
      st.m.bias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
    }
    st.v = st.m;
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = st.beta1 * m + (1.0 - st.beta1) * g;
    v = st.beta2 * v + (1.0 - st.beta2) * g.cwiseProduct(g);
    param.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + st.epsilon);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, grad.weights[l], st.m.weights[l], st.v.weights[l]);
    update(layers[l].bias, grad.bias[l], st.m.bias[l], st.v.bias[l]);
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
  if (patience < 1) throw ParameterError("patience must be >= 1");
  if (!(min_delta >= 0.0)) throw ParameterError("min_delta must be >= 0");
}

std::size_t TrainConfig::effective_batch(std::size_t n) const {
  if (batch_size > 0) return std::min(batch_size, n);
  return n <= 4096 ? n : 1024;
}

TrainConfig desk_scale_config() {
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 300;
  cfg.patience = 10;
  cfg.batch_size = 64;
  return cfg;
}

TrainResult train(const Network& net, const LabeledDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw SizeError("cannot train on an empty dataset");
  if (ds.d != net.input_dim()) throw ShapeError("dataset and network dimensions differ");
  if (net.output_activation() != OutputActivation::sigmoid) {
    throw ParameterError("training expects a sigmoid output");
  }
  TrainResult result{net, 0, 0.0, false};
  if (cfg.max_epochs == 0) return result;

  std::vector<DenseLayer> layers = net.layers();
  AdamState adam;
  Tape tape;
  const std::size_t n = ds.size();
  const std::size_t batch = cfg.effective_batch(n);
  const bool full_batch = batch >= n;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> batch_labels;
  double best = std::numeric_limits<double>::infinity();
  std::size_t wait = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    if (full_batch) {
      auto lg = loss_and_grad(layers, ds.points, ds.labels, tape);
      epoch_loss = lg.loss;
      if (!std::isfinite(epoch_loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
      }
      adam_step(layers, lg.grad, cfg.learning_rate, adam);
    } else {
      CounterRng rng(derive_seed({cfg.seed, epoch}));
      for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[static_cast<std::size_t>(rng.below(k))]);
      for (std::size_t begin = 0; begin < n; begin += batch) {
        const std::size_t end = std::min(n, begin + batch);
        const Eigen::MatrixXd x = gather(ds, order, begin, end, batch_labels);
        auto lg = loss_and_grad(layers, x, batch_labels, tape);
        if (!std::isfinite(lg.loss)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch << ", batch starting at " << begin;
          throw TrainingError(msg.str());
        }
        epoch_loss += lg.loss * static_cast<double>(end - begin);
        adam_step(layers, lg.grad, cfg.learning_rate, adam);
      }
      epoch_loss /= static_cast<double>(n);
    }
    result.epochs_run = epoch + 1;
    result.final_loss = epoch_loss;
    if (epoch_loss < best - cfg.min_delta) {
      best = epoch_loss;
      wait = 0;
    } else if (++wait >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.net = Network(std::move(layers), net.output_activation());
  return result;
}

std::size_t experiment_width(std::size_t n, double gamma) {
  if (n < 1 || !(gamma > 0.0)) throw ParameterError("experiment_width needs n >= 1 and gamma > 0");
  const double w = std::pow(static_cast<double>(n), 2.0 / (gamma + 2.0));
  return static_cast<std::size_t>(std::ceil(w - 1e-12 * w));
}

std::vector<std::size_t> experiment_arch(std::size_t d, std::size_t n, double gamma) {
  const std::size_t w = experiment_width(n, gamma);
  return {d, 3 * w, 2 * w, w, 1};
}

}  // namespace barron
