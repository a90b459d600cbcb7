#include "barron/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "barron/errors.hpp"
#include "barron/stats.hpp"

namespace barron {

Boundary Boundary::sphere(double radius, std::size_t d) {
  if (!(radius > 0.0 && radius < 1.0)) throw ParameterError("sphere radius must lie in (0,1)");
  return Boundary{SphereBoundary{radius}, d};
}

Boundary Boundary::affine(std::vector<double> normal, double offset) {
  const double norm2 = std::inner_product(normal.begin(), normal.end(), normal.begin(), 0.0);
  if (!(norm2 > 0.0)) throw ParameterError("affine boundary needs a non-zero normal");
  const std::size_t d = normal.size();
  return Boundary{AffineBoundary{std::move(normal), offset}, d};
}

Boundary Boundary::graph(CoverPiece piece) {
  piece.validate();
  const std::size_t d = piece.dim();
  return Boundary{GraphBoundary{std::move(piece)}, d};
}

double dist_to_boundary(const Boundary& b, std::span<const double> x) {
  if (x.size() != b.dimension) throw ShapeError("dist_to_boundary: dimension mismatch");
  if (const auto* s = std::get_if<SphereBoundary>(&b.kind)) {
    const double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    return std::abs(s->radius - norm);
  }
  if (const auto* a = std::get_if<AffineBoundary>(&b.kind)) {
    const double dot = std::inner_product(x.begin(), x.end(), a->normal.begin(), a->offset);
    const double norm = std::sqrt(std::inner_product(a->normal.begin(), a->normal.end(), a->normal.begin(), 0.0));
    return std::abs(dot) / norm;
  }
  return std::get<GraphBoundary>(b.kind).piece.vertical_distance(x);
}

PointSampler uniform_cube_sampler(std::size_t d) {
  return {d, [](CounterRng& rng, std::span<double> out) {
            for (double& v : out) v = rng.uniform();
          }};
}

PointSampler empirical_sampler(const LabeledDataset& ds) {
  if (ds.empty()) throw SizeError("empirical_sampler: empty dataset");
  return {ds.d, [&ds](CounterRng& rng, std::span<double> out) {
            const auto p = ds.point(static_cast<std::size_t>(rng.below(ds.size())));
            std::copy(p.begin(), p.end(), out.begin());
          }};
}

namespace {

McEstimate finish(std::uint64_t hits, std::uint64_t n) {
  McEstimate e;
  e.hits = hits;
  e.samples = n;
  if (n > 0) {
    e.estimate = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(n));
  }
  return e;
}

// Runs `chunk_hits(chunk_index, chunk_size)` over all chunks on a small pool
// and sums the integer results.
template <class ChunkFn>
std::uint64_t run_chunks(std::uint64_t n_mc, unsigned workers, ChunkFn chunk_hits) {
  const std::uint64_t chunks = (n_mc + kMcChunk - 1) / kMcChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t size = std::min(kMcChunk, n_mc - c * kMcChunk);
      hits[c] = chunk_hits(c, size);
    }
  };
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(chunks, 1))));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(worker);
  }
  return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
}

}  // namespace

McEstimate estimate_fraction(const PointSampler& sampler,
                             const std::function<bool(std::span<const double>)>& hit,
                             const McOptions& options) {
  if (options.n_mc < 1) throw ParameterError("n_mc must be positive");
  const auto total = run_chunks(options.n_mc, options.workers, [&](std::uint64_t c, std::uint64_t size) {
    CounterRng rng(derive_seed({options.seed, c}));
    std::vector<double> x(sampler.dim);
    std::uint64_t h = 0;
    for (std::uint64_t k = 0; k < size; ++k) {
      sampler.draw(rng, x);
      h += hit(x) ? 1 : 0;
    }
    return h;
  });
  return finish(total, options.n_mc);
}

McEstimate estimate_margin_mass(const PointSampler& sampler, const Boundary& b, double eps,
                                const McOptions& options) {
  if (sampler.dim != b.dimension) throw ShapeError("sampler and boundary dimensions differ");
  return estimate_fraction(sampler, [&](std::span<const double> x) { return dist_to_boundary(b, x) <= eps; },
                           options);
}

McEstimate estimate_tube_mass(const PointSampler& sampler,
                              const std::function<double(std::span<const double>)>& f, std::size_t coord,
                              double eps, const McOptions& options) {
  if (coord >= sampler.dim) throw ParameterError("tube coordinate out of range");
  return estimate_fraction(
      sampler, [&](std::span<const double> x) { return std::abs(x[coord] - f(x)) <= eps; }, options);
}

McEstimate estimate_disagreement(const Network& net,
                                 const std::function<int(std::span<const double>)>& label,
                                 const PointSampler& sampler, const McOptions& options) {
  if (net.input_dim() != sampler.dim) throw ShapeError("network and sampler dimensions differ");
  if (options.n_mc < 1) throw ParameterError("n_mc must be positive");
  const auto total = run_chunks(options.n_mc, options.workers, [&](std::uint64_t c, std::uint64_t size) {
    CounterRng rng(derive_seed({options.seed, c}));
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(sampler.dim), static_cast<Eigen::Index>(size));
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      sampler.draw(rng, std::span<double>(pts.col(k).data(), sampler.dim));
    }
    const Eigen::MatrixXd out = net.forward_batch(pts);
    std::uint64_t h = 0;
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      const int y = label(std::span<const double>(pts.col(k).data(), sampler.dim));
      h += std::abs(out(0, k) - static_cast<double>(y)) > kDisagreementTolerance ? 1 : 0;
    }
    return h;
  });
  return finish(total, options.n_mc);
}

double fit_margin_exponent(std::span<const double> eps, std::span<const double> masses) {
  if (eps.size() != masses.size()) throw FitError("eps and masses differ in length");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (masses[i] > 0.0 && eps[i] > 0.0) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(masses[i]));
    }
  }
  if (lx.size() < 2) throw FitError("fewer than two positive masses");
  return ordinary_least_squares(lx, ly).slope;
}

std::vector<double> empirical_margin_masses(const LabeledDataset& ds, std::span<const double> eps) {
  if (!ds.has_distances()) throw ParameterError("dataset carries no distances");
  if (ds.empty()) throw SizeError("empty dataset");
  std::vector<double> sorted = ds.distances;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(eps.size());
  for (double e : eps) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), e) - sorted.begin();
    out.push_back(static_cast<double>(count) / static_cast<double>(sorted.size()));
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw ParameterError("log_grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

}  // namespace barron
