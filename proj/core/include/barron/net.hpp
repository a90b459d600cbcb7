#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace barron {

/// ReLU activation max{0, x}.
inline double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

enum class OutputActivation { identity, sigmoid };

/// One affine map x -> W x + b. W has shape (out, in).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights.rows()); }
};

/// Feedforward network: ReLU after every layer except the last, then the
/// output activation. Immutable once built; the trainer works on copies.
class Network {
 public:
  explicit Network(std::vector<DenseLayer> layers,
                   OutputActivation output = OutputActivation::identity);

  std::size_t input_dim() const { return layers_.front().in_dim(); }
  std::size_t output_dim() const { return layers_.back().out_dim(); }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t num_hidden_layers() const { return layers_.size() - 1; }
  OutputActivation output_activation() const { return output_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// (d_0, d_1, ..., d_{L+1}).
  std::vector<std::size_t> architecture() const;

  Eigen::VectorXd forward(std::span<const double> x) const;
  double forward_scalar(std::span<const double> x) const;
  /// Column-per-sample batch evaluation. Returns (output_dim x batch).
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  Network with_output_activation(OutputActivation output) const;

 private:
  void validate() const;

  std::vector<DenseLayer> layers_;
  OutputActivation output_;
};

struct ArchitectureReport {
  std::vector<std::size_t> architecture;
  std::size_t num_neurons = 0;
  std::size_t num_nonzero_weights = 0;
  double max_abs_param = 0.0;
  std::size_t num_hidden_layers = 0;
};

/// Neuron count N(Phi), non-zero parameter count W(Phi), largest magnitude W_inf(Phi).
ArchitectureReport audit(const Network& net);

/// Network of the given architecture with every parameter equal to zero.
Network zero_network(std::span<const std::size_t> architecture,
                     OutputActivation output = OutputActivation::identity);

std::string to_string(OutputActivation a);
OutputActivation output_activation_from_string(const std::string& s);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const ArchitectureReport& r);

}  // namespace barron
