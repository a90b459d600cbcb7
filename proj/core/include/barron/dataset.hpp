#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace barron {

struct DatasetMeta {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::string stage;
};

/// Points in [0,1]^d stored one column per sample, with {0,1} labels and
/// optional distances to the decision boundary.
struct LabeledDataset {
  std::size_t d = 0;
  Eigen::MatrixXd points;          // d x n
  std::vector<int> labels;
  std::vector<double> distances;   // empty or size n
  DatasetMeta meta;

  LabeledDataset() = default;
  explicit LabeledDataset(std::size_t dim) : d(dim), points(static_cast<Eigen::Index>(dim), 0) {}

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  bool has_distances() const { return !distances.empty(); }
  std::span<const double> point(std::size_t i) const {
    return {points.col(static_cast<Eigen::Index>(i)).data(), d};
  }
  std::size_t count_label(int label) const;

  /// Subset in the given order.
  LabeledDataset select(std::span<const std::size_t> indices) const;
  /// Throws ShapeError/FormatError when the invariants are broken.
  void validate() const;
};

/// Appends `b` to `a`; dimensions must agree.
LabeledDataset concatenate(const LabeledDataset& a, const LabeledDataset& b);

/// CSV with header x_0..x_{d-1},label,dist. Numbers use the shortest
/// round-trip representation, so equal datasets give equal bytes.
void write_csv(const LabeledDataset& ds, std::ostream& out);
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_csv(std::istream& in);
LabeledDataset read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace barron
