#include "barron/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "barron/errors.hpp"

namespace barron {

namespace {

// Side lengths equal to 2*deltahat up to rounding still get a (point) plateau.
bool too_short(double length, double deltahat) { return length < 2.0 * deltahat * (1.0 - 1e-12); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Sums the scalar outputs of equally deep networks that share one input.
Network stack_parallel(const std::vector<Network>& parts) {
  const std::size_t depth = parts.front().num_layers();
  const std::size_t in = parts.front().input_dim();
  for (const auto& p : parts) {
    if (p.num_layers() != depth || p.input_dim() != in || p.output_dim() != 1) {
      throw ShapeError("stack_parallel: incompatible piece networks");
    }
  }
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l < depth; ++l) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const auto& p : parts) {
      rows += p.layers()[l].out_dim();
      cols += p.layers()[l].in_dim();
    }
    if (l == 0) cols = in;
    if (l + 1 == depth) rows = 1;
    DenseLayer out{Eigen::MatrixXd::Zero(idx(rows), idx(cols)), Eigen::VectorXd::Zero(idx(rows))};
    std::size_t r0 = 0;
    std::size_t c0 = 0;
    for (const auto& p : parts) {
      const auto& src = p.layers()[l];
      const std::size_t rr = (l + 1 == depth) ? 0 : r0;
      const std::size_t cc = (l == 0) ? 0 : c0;
      out.weights.block(idx(rr), idx(cc), src.weights.rows(), src.weights.cols()) = src.weights;
      if (l + 1 == depth) {
        out.bias(0) += src.bias(0);
      } else {
        out.bias.segment(idx(rr), src.bias.size()) = src.bias;
      }
      r0 += src.out_dim();
      c0 += src.in_dim();
    }
    layers.push_back(std::move(out));
  }
  return Network(std::move(layers));
}

}  // namespace

// ---------------------------------------------------------------------------
// Horizon functions

double evaluate(const HorizonFunction& f, std::span<const double> z) {
  return std::visit(
      overloaded{
          [&](const AffineHorizon& a) {
            if (a.weights.size() != z.size()) throw ShapeError("affine horizon: dimension mismatch");
            return std::inner_product(z.begin(), z.end(), a.weights.begin(), a.offset);
          },
          [&](const CosineHorizon& c) {
            if (c.frequency.size() != z.size()) throw ShapeError("cosine horizon: dimension mismatch");
            const double s = std::inner_product(z.begin(), z.end(), c.frequency.begin(), 0.0);
            return c.center + c.amplitude * std::cos(s);
          },
      },
      f);
}

std::size_t input_dim(const HorizonFunction& f) {
  return std::visit(overloaded{[](const AffineHorizon& a) { return a.weights.size(); },
                               [](const CosineHorizon& c) { return c.frequency.size(); }},
                    f);
}

// ---------------------------------------------------------------------------
// CoverPiece

std::vector<double> CoverPiece::project(std::span<const double> x) const {
  if (x.size() != dim()) throw ShapeError("point dimension does not match the piece");
  std::vector<double> z(dim() - 1);
  for (std::size_t q = 0; q + 1 < dim(); ++q) z[q] = x[permutation[q]];
  return z;
}

bool CoverPiece::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!rectangle[j].contains(x[j])) return false;
  }
  return true;
}

double CoverPiece::boundary_value(std::span<const double> x) const {
  const auto z = project(x);
  if (boundary) return evaluate(*boundary, z);
  return approximant.forward_scalar(z);
}

int CoverPiece::side(std::span<const double> x) const {
  const double f = boundary_value(x);
  const double xi = x[distinguished_coord];
  return orientation == Orientation::below ? (xi <= f ? 1 : 0) : (xi >= f ? 1 : 0);
}

double CoverPiece::vertical_distance(std::span<const double> x) const {
  return std::abs(x[distinguished_coord] - boundary_value(x));
}

double CoverPiece::face_distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dim(); ++j) {
    best = std::min({best, x[j] - rectangle[j].lo, rectangle[j].hi - x[j]});
  }
  return best;
}

void CoverPiece::validate() const {
  const std::size_t d = dim();
  if (d < 2) throw SpecError("cover pieces need d >= 2");
  for (std::size_t j = 0; j < d; ++j) {
    const auto& iv = rectangle[j];
    if (!(0.0 <= iv.lo && iv.lo <= iv.hi && iv.hi <= 1.0)) {
      throw SpecError("rectangle side " + std::to_string(j) + " is not a sub-interval of [0,1]");
    }
  }
  if (permutation.size() != d) throw SpecError("permutation must list all d coordinates");
  std::vector<bool> seen(d, false);
  for (std::size_t p : permutation) {
    if (p >= d || seen[p]) throw SpecError("permutation is not a permutation of 0..d-1");
    seen[p] = true;
  }
  if (distinguished_coord >= d || permutation.back() != distinguished_coord) {
    throw SpecError("the permutation must end with the distinguished coordinate");
  }
  if (approximant.num_hidden_layers() != 1 || approximant.output_dim() != 1) {
    throw SpecError("approximant must be a shallow network with one output");
  }
  if (approximant.input_dim() != d - 1) {
    throw SpecError("approximant input dimension " + std::to_string(approximant.input_dim()) +
                    " != d-1 = " + std::to_string(d - 1));
  }
  if (boundary && input_dim(*boundary) != d - 1) {
    throw SpecError("boundary function input dimension != d-1");
  }
}

// ---------------------------------------------------------------------------
// ClassifierSpec

std::size_t ClassifierSpec::dim() const {
  if (pieces.empty()) throw SpecError("classifier spec has no pieces");
  return pieces.front().dim();
}

double ClassifierSpec::delta() const { return delta_from(c1, dim(), width); }

double ClassifierSpec::deltahat() const { return deltahat_from(delta(), gamma, alpha); }

void ClassifierSpec::validate() const {
  if (pieces.empty()) throw SpecError("classifier spec has no pieces");
  if (!(c1 > 0.0)) throw SpecError("C1 must be positive");
  if (!(gamma > 0.0)) throw SpecError("gamma must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw SpecError("alpha must lie in (0,1]");
  if (width < 1) throw SpecError("width N must be at least 1");
  const std::size_t d = dim();
  const double tol = delta();
  for (std::size_t m = 0; m < pieces.size(); ++m) {
    const auto& piece = pieces[m];
    if (piece.dim() != d) throw SpecError("pieces disagree on the dimension");
    piece.validate();
    if (piece.approximant_width() > width) {
      throw SpecError("piece " + std::to_string(m) + " approximant is wider than N");
    }
    if (piece.boundary) {
      const double err = grid_sup_error(*piece.boundary, piece.approximant, 20000);
      if (err > tol * (1.0 + 1e-12)) {
        throw SpecError("piece " + std::to_string(m) + " approximant error " + std::to_string(err) +
                        " exceeds C1*sqrt((d-1)/N) = " + std::to_string(tol));
      }
    }
  }
  for (std::size_t m = 0; m < pieces.size(); ++m) {
    for (std::size_t k = m + 1; k < pieces.size(); ++k) {
      bool overlap = true;
      for (std::size_t j = 0; j < d; ++j) {
        const auto& a = pieces[m].rectangle[j];
        const auto& b = pieces[k].rectangle[j];
        if (std::min(a.hi, b.hi) <= std::max(a.lo, b.lo)) overlap = false;
      }
      if (overlap) {
        throw SpecError("rectangles of pieces " + std::to_string(m) + " and " + std::to_string(k) +
                        " have overlapping interiors");
      }
    }
  }
}

int indicator(const ClassifierSpec& spec, std::span<const double> x) {
  for (const auto& piece : spec.pieces) {
    if (piece.contains(x)) return piece.side(x);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Gates

double delta_from(double c1, std::size_t d, std::size_t n) {
  if (d < 2 || n < 1 || !(c1 > 0.0)) throw ParameterError("delta_from needs d >= 2, N >= 1, C1 > 0");
  return c1 * std::sqrt(static_cast<double>(d - 1) / static_cast<double>(n));
}

double deltahat_from(double delta, double gamma, double alpha) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  if (!(gamma > 0.0) || !(alpha > 0.0)) throw ParameterError("gamma and alpha must be positive");
  return std::pow(delta, gamma / alpha);
}

Network h_delta_gate(double delta) {
  if (!(delta > 0.0)) throw ParameterError("h_delta_gate: delta must be positive");
  DenseLayer hidden{Eigen::MatrixXd::Ones(2, 1), Eigen::Vector2d(0.0, -delta)};
  DenseLayer out{Eigen::RowVector2d(1.0 / delta, -1.0 / delta), Eigen::VectorXd::Zero(1)};
  return Network({std::move(hidden), std::move(out)});
}

Network tube_gate(double a, double b, double deltahat) {
  if (!(deltahat > 0.0)) throw ParameterError("tube_gate: deltahat must be positive");
  if (!(0.0 <= a && a <= b && b <= 1.0)) throw ParameterError("tube_gate: need 0 <= a <= b <= 1");
  if (too_short(b - a, deltahat)) {
    throw DegenerateRectangle("tube_gate: b - a = " + std::to_string(b - a) + " < 2*deltahat");
  }
  DenseLayer hidden{Eigen::MatrixXd::Ones(4, 1), Eigen::Vector4d(-a, -a - deltahat, -b + deltahat, -b)};
  Eigen::MatrixXd w(1, 4);
  w << 1.0, -1.0, -1.0, 1.0;
  DenseLayer out{w / deltahat, Eigen::VectorXd::Zero(1)};
  return Network({std::move(hidden), std::move(out)});
}

// ---------------------------------------------------------------------------
// Piece network
//
// Hidden layer 1 (N + 2d + 2 units):
//   [0, N)          approximant units on x^(i) (zero rows past its width)
//   N + 2j, +1      relu(x_j), relu(-x_j)         j = 0..d-1
//   N + 2d, +1      relu(x_i), relu(-x_i)         distinguished coordinate
// Hidden layer 2 (4d + 2 units):
//   0, 1            relu(s*(Phi_m - x_i)), relu(s*(Phi_m - x_i) - delta)
//   2 + 4j + q      relu(x_j - a_j), relu(x_j - a_j - dh), relu(x_j - b_j + dh), relu(x_j - b_j)
// Hidden layer 3 (1 unit):
//   relu(sum_j t_j(x_j) + H_delta(s*(Phi_m - x_i)) - d)
// s = +1 for orientation below, -1 for above.

Network build_piece_network(const CoverPiece& piece, double delta, double deltahat,
                            std::size_t width) {
  piece.validate();
  if (!(delta > 0.0) || !(deltahat > 0.0)) throw ParameterError("delta and deltahat must be positive");
  const std::size_t d = piece.dim();
  const std::size_t na = piece.approximant_width();
  const std::size_t n = width == 0 ? na : width;
  if (na > n) throw SpecError("approximant is wider than the requested width");

  const std::size_t h1 = n + 2 * d + 2;
  const std::size_t h2 = 4 * d + 2;
  const std::vector<std::size_t> arch{d, h1, h2, 1, 1};

  for (const auto& side : piece.rectangle) {
    if (too_short(side.length(), deltahat)) return zero_network(arch);
  }

  const auto& inner = piece.approximant.layers()[0];
  const auto& outer = piece.approximant.layers()[1];
  const std::size_t xi = piece.distinguished_coord;
  const double s = piece.orientation == Orientation::below ? 1.0 : -1.0;

  DenseLayer l1{Eigen::MatrixXd::Zero(idx(h1), idx(d)), Eigen::VectorXd::Zero(idx(h1))};
  for (std::size_t k = 0; k < na; ++k) {
    for (std::size_t q = 0; q + 1 < d; ++q) {
      l1.weights(idx(k), idx(piece.permutation[q])) = inner.weights(idx(k), idx(q));
    }
    l1.bias(idx(k)) = inner.bias(idx(k));
  }
  for (std::size_t j = 0; j < d; ++j) {
    l1.weights(idx(n + 2 * j), idx(j)) = 1.0;
    l1.weights(idx(n + 2 * j + 1), idx(j)) = -1.0;
  }
  l1.weights(idx(n + 2 * d), idx(xi)) = 1.0;
  l1.weights(idx(n + 2 * d + 1), idx(xi)) = -1.0;

  DenseLayer l2{Eigen::MatrixXd::Zero(idx(h2), idx(h1)), Eigen::VectorXd::Zero(idx(h2))};
  for (Eigen::Index arm = 0; arm < 2; ++arm) {
    for (std::size_t k = 0; k < na; ++k) l2.weights(arm, idx(k)) = s * outer.weights(0, idx(k));
    l2.weights(arm, idx(n + 2 * d)) = -s;
    l2.weights(arm, idx(n + 2 * d + 1)) = s;
    l2.bias(arm) = s * outer.bias(0) - (arm == 1 ? delta : 0.0);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double a = piece.rectangle[j].lo;
    const double b = piece.rectangle[j].hi;
    const double offsets[4] = {-a, -a - deltahat, -b + deltahat, -b};
    for (std::size_t q = 0; q < 4; ++q) {
      const auto row = idx(2 + 4 * j + q);
      l2.weights(row, idx(n + 2 * j)) = 1.0;
      l2.weights(row, idx(n + 2 * j + 1)) = -1.0;
      l2.bias(row) = offsets[q];
    }
  }

  DenseLayer l3{Eigen::MatrixXd::Zero(1, idx(h2)), Eigen::VectorXd::Constant(1, -static_cast<double>(d))};
  l3.weights(0, 0) = 1.0 / delta;
  l3.weights(0, 1) = -1.0 / delta;
  const double tube_signs[4] = {1.0, -1.0, -1.0, 1.0};
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t q = 0; q < 4; ++q) l3.weights(0, idx(2 + 4 * j + q)) = tube_signs[q] / deltahat;
  }

  DenseLayer out{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)};
  return Network({std::move(l1), std::move(l2), std::move(l3), std::move(out)});
}

Network build_classifier(const ClassifierSpec& spec) {
  if (spec.pieces.empty()) throw SpecError("build_classifier: empty piece list");
  const double delta = spec.delta();
  const double deltahat = spec.deltahat();
  std::vector<Network> parts;
  parts.reserve(spec.pieces.size());
  for (const auto& piece : spec.pieces) {
    if (piece.dim() != spec.dim()) throw SpecError("pieces disagree on the dimension");
    parts.push_back(build_piece_network(piece, delta, deltahat, spec.width));
  }
  return stack_parallel(parts);
}

BoundReport verify_theorem1_bounds(const Network& net, const ClassifierSpec& spec) {
  BoundReport r;
  r.d = spec.dim();
  r.pieces = spec.pieces.size();
  r.width = spec.width;
  r.audit = audit(net);
  const std::size_t d = r.d;
  const std::size_t m = r.pieces;
  const std::size_t n = r.width;

  r.theorem_architecture = {d, m * (2 * (d + 1) + n), m * (2 * d + 2), m, 1};
  r.appendix_architecture = {d, m * (2 * (d + 1) + n), m * (4 * d + 2), m, 1};

  r.hidden_layers_ok = r.audit.num_hidden_layers == 3;
  r.weight_cap = 41 * m * d * d * n;
  r.weights_ok = r.audit.num_nonzero_weights <= r.weight_cap;
  const double ratio = static_cast<double>(n) / spec.c1;
  r.magnitude_cap = (1.0 + std::sqrt(spec.c1)) * (7.0 + ratio + std::pow(ratio, spec.gamma / spec.alpha));
  r.magnitude_ok = r.audit.max_abs_param <= r.magnitude_cap;
  r.theorem_neuron_total = m * (4 * (d + 1) + n + 1) + d + 1;
  r.appendix_neuron_total = m * (6 * d + 5 + n) + d + 1;
  r.neurons_ok = r.audit.num_neurons <= std::max(r.theorem_neuron_total, r.appendix_neuron_total);
  return r;
}

// ---------------------------------------------------------------------------
// Approximants

Network affine_approximant(const AffineHorizon& f, std::size_t width) {
  if (width < 1) throw ParameterError("affine_approximant: width must be >= 1");
  const std::size_t k = f.weights.size();
  if (k == 0) throw ParameterError("affine_approximant: empty weight vector");
  double lowest = 0.0;
  for (double w : f.weights) lowest += std::min(w, 0.0);
  DenseLayer hidden{Eigen::MatrixXd::Zero(idx(width), idx(k)), Eigen::VectorXd::Zero(idx(width))};
  for (std::size_t q = 0; q < k; ++q) hidden.weights(0, idx(q)) = f.weights[q];
  hidden.bias(0) = -lowest;
  DenseLayer out{Eigen::MatrixXd::Zero(1, idx(width)), Eigen::VectorXd::Constant(1, f.offset + lowest)};
  out.weights(0, 0) = 1.0;
  return Network({std::move(hidden), std::move(out)});
}

FittedApproximant fit_cosine_approximant(const CosineHorizon& f, std::size_t width) {
  if (width < 1) throw ParameterError("fit_cosine_approximant: width must be >= 1");
  const std::size_t k = f.frequency.size();
  if (k == 0) throw ParameterError("fit_cosine_approximant: empty frequency vector");
  double s_lo = 0.0;
  double s_hi = 0.0;
  for (double w : f.frequency) {
    s_lo += std::min(w, 0.0);
    s_hi += std::max(w, 0.0);
  }
  auto profile = [&](double s) { return f.center + f.amplitude * std::cos(s); };

  DenseLayer hidden{Eigen::MatrixXd::Zero(idx(width), idx(k)), Eigen::VectorXd::Zero(idx(width))};
  DenseLayer out{Eigen::MatrixXd::Zero(1, idx(width)), Eigen::VectorXd::Zero(1)};

  if (s_hi - s_lo <= 0.0) {
    out.bias(0) = profile(0.0);
  } else {
    const double h = (s_hi - s_lo) / static_cast<double>(width);
    for (std::size_t u = 0; u < width; ++u) {
      for (std::size_t q = 0; q < k; ++q) hidden.weights(idx(u), idx(q)) = f.frequency[q];
      hidden.bias(idx(u)) = -(s_lo + static_cast<double>(u) * h);
    }
    const std::size_t samples = 64 * width + 1;
    Eigen::MatrixXd design(idx(samples), idx(width + 1));
    Eigen::VectorXd target(idx(samples));
    for (std::size_t r = 0; r < samples; ++r) {
      const double s = s_lo + (s_hi - s_lo) * static_cast<double>(r) / static_cast<double>(samples - 1);
      for (std::size_t u = 0; u < width; ++u) {
        design(idx(r), idx(u)) = relu(s + hidden.bias(idx(u)));
      }
      design(idx(r), idx(width)) = 1.0;
      target(idx(r)) = profile(s);
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
    out.weights = coef.head(idx(width)).transpose();
    out.bias(0) = coef(idx(width));
  }
  Network net({std::move(hidden), std::move(out)});

  // Both f and the network depend on z only through s = <frequency, z>, so a
  // dense scan of s covers every point of the cube.
  double err = 0.0;
  const std::size_t scan = 20000;
  const auto& l0 = net.layers()[0];
  const auto& l1 = net.layers()[1];
  for (std::size_t r = 0; r <= scan; ++r) {
    const double s = s_lo + (s_hi - s_lo) * static_cast<double>(r) / static_cast<double>(scan);
    double v = l1.bias(0);
    for (std::size_t u = 0; u < width; ++u) v += l1.weights(0, idx(u)) * relu(s + l0.bias(idx(u)));
    err = std::max(err, std::abs(v - profile(s)));
  }
  err = std::max(err, grid_sup_error(HorizonFunction{f}, net, 20000));
  return {std::move(net), err};
}

double grid_sup_error(const HorizonFunction& f, const Network& net, std::size_t budget) {
  const std::size_t k = input_dim(f);
  if (net.input_dim() != k) throw ShapeError("grid_sup_error: dimension mismatch");
  auto per_axis = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(budget), 1.0 / static_cast<double>(k))));
  per_axis = std::max<std::size_t>(per_axis, 2);
  std::size_t total = 1;
  for (std::size_t q = 0; q < k; ++q) total *= per_axis;

  Eigen::MatrixXd pts(idx(k), idx(total));
  std::vector<double> z(k);
  Eigen::VectorXd truth(idx(total));
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    for (std::size_t q = 0; q < k; ++q) {
      z[q] = static_cast<double>(rem % per_axis) / static_cast<double>(per_axis - 1);
      rem /= per_axis;
      pts(idx(q), idx(c)) = z[q];
    }
    truth(idx(c)) = evaluate(f, z);
  }
  const Eigen::MatrixXd pred = net.forward_batch(pts);
  return (pred.row(0).transpose() - truth).cwiseAbs().maxCoeff();
}

ClassifierSpec make_slab_spec(const SlabSpecOptions& o) {
  if (o.d < 2) throw ParameterError("make_slab_spec: d must be >= 2");
  if (o.pieces < 1) throw ParameterError("make_slab_spec: need at least one piece");
  ClassifierSpec spec;
  spec.c1 = o.c1;
  spec.gamma = o.gamma;
  spec.alpha = o.alpha;
  spec.width = o.width;
  const double tol = delta_from(o.c1, o.d, o.width);

  for (std::size_t m = 0; m < o.pieces; ++m) {
    std::vector<Interval> rect(o.d, Interval{0.0, 1.0});
    rect[0] = {static_cast<double>(m) / static_cast<double>(o.pieces),
               static_cast<double>(m + 1) / static_cast<double>(o.pieces)};
    std::vector<std::size_t> perm(o.d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (m % 2 == 1) std::reverse(perm.begin(), perm.end() - 1);
    const std::size_t k = o.d - 1;

    HorizonFunction boundary;
    Network approx = zero_network(std::vector<std::size_t>{k, o.width, 1});
    double err = 0.0;
    if (o.family == BoundaryFamily::affine) {
      AffineHorizon a{std::vector<double>(k), 0.5};
      for (std::size_t q = 0; q < k; ++q) a.weights[q] = (q % 2 == 0 ? 0.1 : -0.1) / static_cast<double>(k);
      approx = affine_approximant(a, o.width);
      err = grid_sup_error(a, approx, 20000);
      boundary = std::move(a);
    } else {
      CosineHorizon c{std::vector<double>(k), o.amplitude, 0.5};
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      for (std::size_t q = 0; q < k; ++q) c.frequency[q] = sign * std::numbers::pi / static_cast<double>(k);
      auto fitted = fit_cosine_approximant(c, o.width);
      approx = std::move(fitted.net);
      err = fitted.certified_error;
      boundary = std::move(c);
    }
    if (err > tol) {
      throw SpecError("make_slab_spec: approximant error " + std::to_string(err) +
                      " exceeds C1*sqrt((d-1)/N) = " + std::to_string(tol));
    }
    spec.pieces.push_back(CoverPiece{std::move(rect), std::move(perm), o.d - 1,
                                     m % 2 == 0 ? Orientation::below : Orientation::above,
                                     std::move(approx), std::move(boundary), err});
  }
  return spec;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json horizon_to_json(const HorizonFunction& f) {
  return std::visit(
      overloaded{[](const AffineHorizon& a) -> nlohmann::json {
                   return {{"kind", "affine"}, {"weights", a.weights}, {"offset", a.offset}};
                 },
                 [](const CosineHorizon& c) -> nlohmann::json {
                   return {{"kind", "cosine"},
                           {"frequency", c.frequency},
                           {"amplitude", c.amplitude},
                           {"center", c.center}};
                 }},
      f);
}

HorizonFunction horizon_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "affine") {
    return AffineHorizon{j.at("weights").get<std::vector<double>>(), j.at("offset").get<double>()};
  }
  if (kind == "cosine") {
    return CosineHorizon{j.at("frequency").get<std::vector<double>>(), j.at("amplitude").get<double>(),
                         j.value("center", 0.5)};
  }
  throw FormatError("unknown boundary kind '" + kind + "'");
}

}  // namespace

nlohmann::json spec_to_json(const ClassifierSpec& spec) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : spec.pieces) {
    nlohmann::json rect = nlohmann::json::array();
    for (const auto& iv : p.rectangle) rect.push_back({iv.lo, iv.hi});
    nlohmann::json jp{{"rectangle", std::move(rect)},
                      {"permutation", p.permutation},
                      {"distinguished_coord", p.distinguished_coord},
                      {"orientation", p.orientation == Orientation::below ? "below" : "above"},
                      {"approximant", network_to_json(p.approximant)},
                      {"certified_error", p.certified_error}};
    if (p.boundary) jp["boundary"] = horizon_to_json(*p.boundary);
    pieces.push_back(std::move(jp));
  }
  return {{"c1", spec.c1}, {"gamma", spec.gamma}, {"alpha", spec.alpha}, {"width", spec.width},
          {"pieces", std::move(pieces)}};
}

ClassifierSpec spec_from_json(const nlohmann::json& j) {
  try {
    ClassifierSpec spec;
    spec.c1 = j.at("c1").get<double>();
    spec.gamma = j.at("gamma").get<double>();
    spec.alpha = j.at("alpha").get<double>();
    spec.width = j.at("width").get<std::size_t>();
    for (const auto& jp : j.at("pieces")) {
      std::vector<Interval> rect;
      for (const auto& side : jp.at("rectangle")) {
        rect.push_back({side.at(0).get<double>(), side.at(1).get<double>()});
      }
      const auto orient = jp.at("orientation").get<std::string>();
      if (orient != "below" && orient != "above") throw FormatError("orientation must be below|above");
      std::optional<HorizonFunction> boundary;
      if (jp.contains("boundary")) boundary = horizon_from_json(jp.at("boundary"));
      spec.pieces.push_back(CoverPiece{std::move(rect), jp.at("permutation").get<std::vector<std::size_t>>(),
                                       jp.at("distinguished_coord").get<std::size_t>(),
                                       orient == "below" ? Orientation::below : Orientation::above,
                                       network_from_json(jp.at("approximant")), std::move(boundary),
                                       jp.value("certified_error", 0.0)});
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("classifier spec JSON: ") + e.what());
  }
}

nlohmann::json bound_report_to_json(const BoundReport& r) {
  return {{"d", r.d},
          {"pieces", r.pieces},
          {"width", r.width},
          {"audit", report_to_json(r.audit)},
          {"theorem_architecture", r.theorem_architecture},
          {"appendix_architecture", r.appendix_architecture},
          {"hidden_layers_ok", r.hidden_layers_ok},
          {"weight_cap", r.weight_cap},
          {"weights_ok", r.weights_ok},
          {"magnitude_cap", r.magnitude_cap},
          {"magnitude_ok", r.magnitude_ok},
          {"theorem_neuron_total", r.theorem_neuron_total},
          {"appendix_neuron_total", r.appendix_neuron_total},
          {"neurons_ok", r.neurons_ok},
          {"all_ok", r.all_ok()}};
}

}  // namespace barron
