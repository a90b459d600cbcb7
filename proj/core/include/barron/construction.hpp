#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "barron/net.hpp"

namespace barron {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double u) const { return lo <= u && u <= hi; }
};

/// Which side of the graph x_i = f(x^(i)) belongs to the set inside the piece.
enum class Orientation { below, above };

/// f(z) = <weights, z> + offset.
struct AffineHorizon {
  std::vector<double> weights;
  double offset = 0.5;
};

/// f(z) = center + amplitude * cos(<frequency, z>).
struct CosineHorizon {
  std::vector<double> frequency;
  double amplitude = 0.2;
  double center = 0.5;
};

using HorizonFunction = std::variant<AffineHorizon, CosineHorizon>;

double evaluate(const HorizonFunction& f, std::span<const double> z);
std::size_t input_dim(const HorizonFunction& f);

/// One rectangle of the cover together with the horizon function that
/// describes the set inside it.
///
/// `permutation` lists all d coordinates; its first d-1 entries give the
/// order in which x^(i) is fed to the boundary function and its last entry
/// is `distinguished_coord`. `boundary` is the exact horizon function; when
/// absent, the approximant is taken to be exact.
struct CoverPiece {
  std::vector<Interval> rectangle;
  std::vector<std::size_t> permutation;
  std::size_t distinguished_coord = 0;
  Orientation orientation = Orientation::below;
  Network approximant;
  std::optional<HorizonFunction> boundary;
  double certified_error = 0.0;

  std::size_t dim() const { return rectangle.size(); }
  std::size_t approximant_width() const { return approximant.layers().front().out_dim(); }

  /// x^(i) in permutation order.
  std::vector<double> project(std::span<const double> x) const;
  bool contains(std::span<const double> x) const;
  /// f(x^(i)) from the exact boundary, or from the approximant when none is stored.
  double boundary_value(std::span<const double> x) const;
  /// 1 iff x lies on the inside of the graph (ignores the rectangle).
  int side(std::span<const double> x) const;
  /// |x_i - f(x^(i))|.
  double vertical_distance(std::span<const double> x) const;
  /// Smallest distance from x to a face of the rectangle; negative outside.
  double face_distance(std::span<const double> x) const;

  void validate() const;
};

struct ClassifierSpec {
  std::vector<CoverPiece> pieces;
  double c1 = 1.0;
  double gamma = 1.0;
  double alpha = 1.0;
  std::size_t width = 1;

  std::size_t dim() const;
  double delta() const;
  double deltahat() const;
  /// Structural checks plus the sup-norm certificate of every piece.
  void validate() const;
};

/// 1_Omega(x): first piece whose closed rectangle contains x decides.
int indicator(const ClassifierSpec& spec, std::span<const double> x);

/// C1 * sqrt((d-1)/N).
double delta_from(double c1, std::size_t d, std::size_t n);
/// delta^(gamma/alpha).
double deltahat_from(double delta, double gamma, double alpha);

/// One hidden layer computing (relu(x) - relu(x - delta)) / delta.
Network h_delta_gate(double delta);

/// Four ReLU units computing the trapezoid that is 1 on [a+dh, b-dh] and 0
/// outside [a, b]. Throws DegenerateRectangle when b - a < 2 dh.
Network tube_gate(double a, double b, double deltahat);

/// Three-hidden-layer network for one cover piece. Hidden widths are
/// (N + 2d + 2, 4d + 2, 1) where N = `width` (defaults to the approximant
/// width; narrower approximants are padded with zero units). A piece with a
/// side shorter than 2 * deltahat yields the all-zero network.
Network build_piece_network(const CoverPiece& piece, double delta, double deltahat,
                            std::size_t width = 0);

/// Sum of all piece networks; architecture (d, M(N+2d+2), M(4d+2), M, 1).
Network build_classifier(const ClassifierSpec& spec);

struct BoundReport {
  std::size_t d = 0;
  std::size_t pieces = 0;
  std::size_t width = 0;
  ArchitectureReport audit;

  std::vector<std::size_t> theorem_architecture;
  std::vector<std::size_t> appendix_architecture;

  bool hidden_layers_ok = false;
  std::size_t weight_cap = 0;
  bool weights_ok = false;
  double magnitude_cap = 0.0;
  bool magnitude_ok = false;
  std::size_t theorem_neuron_total = 0;
  std::size_t appendix_neuron_total = 0;
  bool neurons_ok = false;

  bool all_ok() const { return hidden_layers_ok && weights_ok && magnitude_ok && neurons_ok; }
};

/// Compares the audit of a built classifier with the size, sparsity and
/// magnitude guarantees of the construction. Failures are reported, not thrown.
BoundReport verify_theorem1_bounds(const Network& net, const ClassifierSpec& spec);

// ---------------------------------------------------------------------------
// Shallow approximants for the shipped boundary families.

/// Exact width-`width` representation of an affine horizon on [0,1]^{d-1}
/// using one active unit relu(<w,z> - m) with m the minimum of <w,z>.
Network affine_approximant(const AffineHorizon& f, std::size_t width);

struct FittedApproximant {
  Network net;
  double certified_error;
};

/// Ridge fit of a cosine horizon: units relu(<frequency, z> - s_k) at evenly
/// spaced knots, output weights by least squares, sup error certified on a
/// dense grid.
FittedApproximant fit_cosine_approximant(const CosineHorizon& f, std::size_t width);

/// Max |f - net| over a regular grid of [0,1]^{d-1} with about `budget` points.
double grid_sup_error(const HorizonFunction& f, const Network& net, std::size_t budget = 200000);

enum class BoundaryFamily { affine, cosine };

struct SlabSpecOptions {
  std::size_t d = 2;
  std::size_t pieces = 1;
  std::size_t width = 4;
  double c1 = 1.0;
  double gamma = 1.0;
  double alpha = 1.0;
  BoundaryFamily family = BoundaryFamily::affine;
  double amplitude = 0.2;
};

/// Cover of [0,1]^d by `pieces` equal slabs along coordinate 0, boundary
/// graphs over the last coordinate, alternating orientation. Throws
/// SpecError if a fitted approximant misses the certificate.
ClassifierSpec make_slab_spec(const SlabSpecOptions& options);

nlohmann::json spec_to_json(const ClassifierSpec& spec);
ClassifierSpec spec_from_json(const nlohmann::json& j);
nlohmann::json bound_report_to_json(const BoundReport& r);

}  // namespace barron
