#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "barron/construction.hpp"
#include "barron/dataset.hpp"
#include "barron/net.hpp"
#include "barron/rng.hpp"

namespace barron {

struct SphereBoundary {
  double radius = 0.5;
};

/// {x : <normal, x> + offset = 0}.
struct AffineBoundary {
  std::vector<double> normal;
  double offset = 0.0;
};

/// Graph of a cover piece's horizon function over its distinguished coordinate.
struct GraphBoundary {
  CoverPiece piece;
};

struct Boundary {
  std::variant<SphereBoundary, GraphBoundary, AffineBoundary> kind;
  std::size_t dimension = 0;

  static Boundary sphere(double radius, std::size_t d);
  static Boundary affine(std::vector<double> normal, double offset);
  static Boundary graph(CoverPiece piece);
};

/// Sphere: |r - ||x|||. Affine: |<n,x> + c| / ||n||. Graph: vertical distance
/// |x_i - f(x^(i))|, which is never smaller than the Euclidean distance.
double dist_to_boundary(const Boundary& b, std::span<const double> x);

/// Source of i.i.d. points; `draw` fills `out` (size dim) from the stream.
struct PointSampler {
  std::size_t dim = 0;
  std::function<void(CounterRng&, std::span<double>)> draw;
};

PointSampler uniform_cube_sampler(std::size_t d);
/// Uniform draw among the points of a dataset (the dataset must outlive the sampler).
PointSampler empirical_sampler(const LabeledDataset& ds);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

struct McOptions {
  std::uint64_t n_mc = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Points per independently seeded chunk. Chunk c draws from
/// derive_seed({seed, c}), so results do not depend on `workers`.
inline constexpr std::uint64_t kMcChunk = 4096;

/// Fraction of sampled points for which `hit` holds, with binomial standard error.
McEstimate estimate_fraction(const PointSampler& sampler,
                             const std::function<bool(std::span<const double>)>& hit,
                             const McOptions& options);

/// mu(dist(x, boundary) <= eps).
McEstimate estimate_margin_mass(const PointSampler& sampler, const Boundary& b, double eps,
                                const McOptions& options);

/// mu(|x_i - f(x^(i))| <= eps); `coord` is 0-based.
McEstimate estimate_tube_mass(const PointSampler& sampler,
                              const std::function<double(std::span<const double>)>& f,
                              std::size_t coord, double eps, const McOptions& options);

/// mu(|net(x) - label(x)| > 1e-9).
McEstimate estimate_disagreement(const Network& net,
                                 const std::function<int(std::span<const double>)>& label,
                                 const PointSampler& sampler, const McOptions& options);

inline constexpr double kDisagreementTolerance = 1e-9;

/// Least-squares slope of log(mass) against log(eps). Non-positive masses are
/// dropped; throws FitError with fewer than two usable points.
double fit_margin_exponent(std::span<const double> eps, std::span<const double> masses);

/// Fraction of dataset points with stored distance <= eps, per eps.
std::vector<double> empirical_margin_masses(const LabeledDataset& ds, std::span<const double> eps);

/// n values log-spaced on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace barron
