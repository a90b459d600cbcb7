#include "barron/net.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "barron/errors.hpp"

namespace barron {

Network::Network(std::vector<DenseLayer> layers, OutputActivation output)
    : layers_(std::move(layers)), output_(output) {
  validate();
}

void Network::validate() const {
  if (layers_.empty()) throw ShapeError("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw ShapeError("layer " + std::to_string(l) + " has an empty weight matrix");
    }
    if (layer.bias.size() != layer.weights.rows()) {
      throw ShapeError("layer " + std::to_string(l) + ": bias length " +
                       std::to_string(layer.bias.size()) + " != rows " +
                       std::to_string(layer.weights.rows()));
    }
    if (l > 0 && layer.in_dim() != layers_[l - 1].out_dim()) {
      throw ShapeError("layer " + std::to_string(l) + " expects input " +
                       std::to_string(layer.in_dim()) + ", previous layer gives " +
                       std::to_string(layers_[l - 1].out_dim()));
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw ParameterError("layer " + std::to_string(l) + " has non-finite parameters");
    }
  }
}

std::vector<std::size_t> Network::architecture() const {
  std::vector<std::size_t> arch;
  arch.reserve(layers_.size() + 1);
  arch.push_back(input_dim());
  for (const auto& layer : layers_) arch.push_back(layer.out_dim());
  return arch;
}

Eigen::VectorXd Network::forward(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw ShapeError("input has dimension " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(input_dim()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weights * a + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  if (output_ == OutputActivation::sigmoid) a = a.unaryExpr([](double v) { return sigmoid(v); });
  return a;
}

double Network::forward_scalar(std::span<const double> x) const {
  if (output_dim() != 1) throw ShapeError("forward_scalar requires a single output");
  return forward(x)(0);
}

Eigen::MatrixXd Network::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_dim()) {
    throw ShapeError("batch rows " + std::to_string(inputs.rows()) + " != input dimension " +
                     std::to_string(input_dim()));
  }
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  if (output_ == OutputActivation::sigmoid) a = a.unaryExpr([](double v) { return sigmoid(v); });
  return a;
}

Network Network::with_output_activation(OutputActivation output) const {
  return Network(layers_, output);
}

ArchitectureReport audit(const Network& net) {
  ArchitectureReport r;
  r.architecture = net.architecture();
  r.num_hidden_layers = net.num_hidden_layers();
  for (std::size_t n : r.architecture) r.num_neurons += n;
  for (const auto& layer : net.layers()) {
    // Structural zeros are placed exactly, so exact comparison is the right test.
    r.num_nonzero_weights += static_cast<std::size_t>((layer.weights.array() != 0.0).count());
    r.num_nonzero_weights += static_cast<std::size_t>((layer.bias.array() != 0.0).count());
    r.max_abs_param = std::max({r.max_abs_param, layer.weights.cwiseAbs().maxCoeff(),
                                layer.bias.size() > 0 ? layer.bias.cwiseAbs().maxCoeff() : 0.0});
  }
  return r;
}

Network zero_network(std::span<const std::size_t> architecture, OutputActivation output) {
  if (architecture.size() < 2) throw ShapeError("architecture needs input and output sizes");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < architecture.size(); ++l) {
    const auto rows = static_cast<Eigen::Index>(architecture[l + 1]);
    const auto cols = static_cast<Eigen::Index>(architecture[l]);
    layers.push_back({Eigen::MatrixXd::Zero(rows, cols), Eigen::VectorXd::Zero(rows)});
  }
  return Network(std::move(layers), output);
}

std::string to_string(OutputActivation a) {
  return a == OutputActivation::sigmoid ? "sigmoid" : "identity";
}

OutputActivation output_activation_from_string(const std::string& s) {
  if (s == "identity") return OutputActivation::identity;
  if (s == "sigmoid") return OutputActivation::sigmoid;
  throw FormatError("unknown final_activation '" + s + "'");
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(layer.weights.cols()));
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row[static_cast<std::size_t>(c)] = layer.weights(r, c);
      rows.push_back(std::move(row));
    }
    std::vector<double> bias(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back({{"weights", std::move(rows)}, {"bias", std::move(bias)}});
  }
  return {{"final_activation", to_string(net.output_activation())}, {"layers", std::move(layers)}};
}

Network network_from_json(const nlohmann::json& j) {
  try {
    std::vector<DenseLayer> layers;
    for (const auto& jl : j.at("layers")) {
      const auto& rows = jl.at("weights");
      const auto& bias = jl.at("bias");
      const auto n_rows = static_cast<Eigen::Index>(rows.size());
      const auto n_cols = n_rows > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
      DenseLayer layer{Eigen::MatrixXd(n_rows, n_cols), Eigen::VectorXd(static_cast<Eigen::Index>(bias.size()))};
      for (Eigen::Index r = 0; r < n_rows; ++r) {
        const auto& row = rows.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != n_cols) throw FormatError("ragged weight matrix");
        for (Eigen::Index c = 0; c < n_cols; ++c) layer.weights(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
      }
      for (std::size_t i = 0; i < bias.size(); ++i) layer.bias(static_cast<Eigen::Index>(i)) = bias.at(i).get<double>();
      layers.push_back(std::move(layer));
    }
    const auto act = output_activation_from_string(j.value("final_activation", std::string("identity")));
    return Network(std::move(layers), act);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("network JSON: ") + e.what());
  }
}

nlohmann::json report_to_json(const ArchitectureReport& r) {
  return {{"architecture", r.architecture},
          {"num_neurons", r.num_neurons},
          {"num_nonzero_weights", r.num_nonzero_weights},
          {"max_abs_param", r.max_abs_param},
          {"num_hidden_layers", r.num_hidden_layers}};
}

}  // namespace barron
