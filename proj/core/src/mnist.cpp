#include "barron/mnist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "barron/errors.hpp"
#include "barron/rng.hpp"
#include "barron/sampler.hpp"

namespace barron {

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& buf, std::size_t offset, const std::filesystem::path& path) {
  if (offset + 4 > buf.size()) {
    throw FormatError(path.string() + ": truncated header at byte " + std::to_string(offset));
  }
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

}  // namespace

LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_all(images);
  const auto lab = read_all(labels);

  if (const auto magic = be32(img, 0, images); magic != 0x803) {
    throw FormatError(images.string() + ": bad magic 0x" + fmt::format("{:x}", magic) + " at byte 0");
  }
  if (const auto magic = be32(lab, 0, labels); magic != 0x801) {
    throw FormatError(labels.string() + ": bad magic 0x" + fmt::format("{:x}", magic) + " at byte 0");
  }
  const std::size_t count = be32(img, 4, images);
  const std::size_t rows = be32(img, 8, images);
  const std::size_t cols = be32(img, 12, images);
  const std::size_t label_count = be32(lab, 4, labels);
  if (count != label_count) {
    throw FormatError("image count " + std::to_string(count) + " != label count " + std::to_string(label_count));
  }
  const std::size_t dim = rows * cols;
  const std::size_t img_header = 16;
  const std::size_t lab_header = 8;
  if (img.size() < img_header + count * dim) {
    throw FormatError(images.string() + ": truncated pixel data at byte " + std::to_string(img.size()));
  }
  if (lab.size() < lab_header + count) {
    throw FormatError(labels.string() + ": truncated label data at byte " + std::to_string(lab.size()));
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < count; ++i) {
    if (lab[lab_header + i] <= 1) keep.push_back(i);
  }
  LabeledDataset ds(dim);
  ds.points.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(keep.size()));
  ds.labels.reserve(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const std::size_t i = keep[j];
    const unsigned char* px = img.data() + img_header + i * dim;
    for (std::size_t p = 0; p < dim; ++p) {
      ds.points(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = px[p] / 255.0;
    }
    ds.labels.push_back(lab[lab_header + i]);
  }
  ds.meta.stage = "idx";
  return ds;
}

// ---------------------------------------------------------------------------
// SMOTE

namespace {

// k nearest neighbours (excluding self) of every column of X, squared
// Euclidean distance, computed blockwise through the Gram matrix.
std::vector<std::vector<std::size_t>> knn(const Eigen::MatrixXd& X, std::size_t k) {
  const Eigen::Index n = X.cols();
  const Eigen::VectorXd sq = X.colwise().squaredNorm().transpose();
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(n));
  constexpr Eigen::Index block = 512;
  std::vector<std::pair<double, std::size_t>> row(static_cast<std::size_t>(n));
  for (Eigen::Index start = 0; start < n; start += block) {
    const Eigen::Index len = std::min(block, n - start);
    const Eigen::MatrixXd gram = X.middleCols(start, len).transpose() * X;
    for (Eigen::Index r = 0; r < len; ++r) {
      const Eigen::Index i = start + r;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d2 = i == j ? std::numeric_limits<double>::infinity() : sq(i) + sq(j) - 2.0 * gram(r, j);
        row[static_cast<std::size_t>(j)] = {d2, static_cast<std::size_t>(j)};
      }
      std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
      auto& nb = out[static_cast<std::size_t>(i)];
      nb.reserve(k);
      for (std::size_t q = 0; q < k; ++q) nb.push_back(row[q].second);
    }
  }
  return out;
}

}  // namespace

LabeledDataset smote_balance(const LabeledDataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw ParameterError("smote_balance: k must be >= 1");
  const std::array<std::size_t, 2> sizes{ds.count_label(0), ds.count_label(1)};
  for (int c = 0; c < 2; ++c) {
    if (sizes[c] < k + 1) {
      throw ParameterError("smote_balance: class " + std::to_string(c) + " has " + std::to_string(sizes[c]) +
                           " points, needs at least k+1 = " + std::to_string(k + 1));
    }
  }
  const auto target = static_cast<std::size_t>(std::ceil(1.95 * static_cast<double>(std::max(sizes[0], sizes[1]))));
  const auto dim = static_cast<Eigen::Index>(ds.d);

  LabeledDataset out(ds.d);
  out.points.resize(dim, static_cast<Eigen::Index>(2 * target));
  out.labels.reserve(2 * target);
  Eigen::Index col = 0;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == c) idx.push_back(i);
    }
    Eigen::MatrixXd X(dim, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      X.col(static_cast<Eigen::Index>(j)) = ds.points.col(static_cast<Eigen::Index>(idx[j]));
    }
    const auto neighbours = knn(X, k);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out.points.col(col++) = X.col(static_cast<Eigen::Index>(j));
      out.labels.push_back(c);
    }
    CounterRng rng(derive_seed({seed, static_cast<std::uint64_t>(c)}));
    for (std::size_t s = idx.size(); s < target; ++s) {
      const std::size_t base = rng.below(idx.size());
      const std::size_t nb = neighbours[base][rng.below(k)];
      const double lambda = rng.uniform();
      const auto b = static_cast<Eigen::Index>(base);
      const auto q = static_cast<Eigen::Index>(nb);
      out.points.col(col++) = (X.col(b) + lambda * (X.col(q) - X.col(b))).cwiseMax(0.0).cwiseMin(1.0);
      out.labels.push_back(c);
    }
  }
  out.meta = ds.meta;
  out.meta.seed = seed;
  out.meta.stage = "smote";
  return out;
}

// ---------------------------------------------------------------------------
// Pilot and calibration

std::vector<std::size_t> pilot_architecture() { return {kMnistDim, 256, 128, 64, 1}; }

TrainConfig pilot_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 200;
  cfg.patience = 5;
  cfg.batch_size = 128;
  cfg.seed = seed;
  return cfg;
}

Network fit_pilot(const LabeledDataset& ds, const TrainConfig& cfg) {
  if (ds.empty()) throw ParameterError("fit_pilot: empty dataset");
  const auto arch = pilot_architecture();
  std::vector<std::size_t> a = arch;
  a.front() = ds.d;
  const Network init = init_network(a, derive_seed({cfg.seed, 0x9170ULL}));
  return train(init, ds, cfg).net;
}

Thresholds calibrate_thresholds(std::span<const double> w, std::span<const int> labels) {
  if (w.size() != labels.size()) throw ShapeError("calibrate_thresholds: size mismatch");
  if (w.size() < 1000) throw CalibrationError("calibrate_thresholds needs at least 1000 outputs");
  std::vector<double> w0;
  std::vector<double> w1;
  for (std::size_t i = 0; i < w.size(); ++i) (labels[i] == 1 ? w1 : w0).push_back(w[i]);
  if (w0.empty() || w1.empty()) throw CalibrationError("calibrate_thresholds: one class is empty");
  std::sort(w0.begin(), w0.end());
  std::sort(w1.begin(), w1.end());
  if (w0.front() == w1.back()) throw CalibrationError("calibrate_thresholds: all outputs equal");
  if (!(w0.back() < w1.front())) {
    throw CalibrationError("calibrate_thresholds: class outputs overlap; drop misclassified points first");
  }
  Thresholds t;
  t.k = static_cast<std::size_t>(std::ceil(0.001 * static_cast<double>(w.size())));
  const std::size_t k0 = t.k / 2;
  const std::size_t k1 = t.k - k0;
  if (k0 >= w0.size() || k1 >= w1.size()) throw CalibrationError("calibrate_thresholds: class too small to trim");
  t.u = w1[k1 - 1];
  t.ell = k0 == 0 ? 0.5 * (w0.back() + w1.front()) : w0[w0.size() - k0];
  return t;
}

void ProxyDistanceModel::validate() const {
  if (!(0.0 < ell && ell <= u && u < 1.0)) throw ParameterError("proxy model needs 0 < ell <= u < 1");
  if (!(w_min < ell && u < w_max)) throw ParameterError("proxy model needs w_min < ell and u < w_max");
}

double rescale_map(double w, const ProxyDistanceModel& m) {
  if (w < m.w_min || w > m.w_max) {
    spdlog::warn("rescale_map: {} outside [{}, {}]; clamped", w, m.w_min, m.w_max);
    w = std::clamp(w, m.w_min, m.w_max);
  }
  if (w <= m.ell) return 0.5 * (w - m.w_min) / (m.ell - m.w_min);
  if (w >= m.u) return 0.5 + 0.5 * (w - m.u) / (m.w_max - m.u);
  return 0.5;
}

double proxy_distance(std::span<const double> x, const ProxyDistanceModel& model) {
  return std::abs(0.5 - rescale_map(model.pilot.forward_scalar(x), model));
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

std::vector<double> pilot_outputs(const Network& pilot, const LabeledDataset& ds) {
  std::vector<double> w(ds.size());
  constexpr Eigen::Index chunk = 2048;
  const Eigen::Index n = ds.points.cols();
  for (Eigen::Index s = 0; s < n; s += chunk) {
    const Eigen::Index len = std::min(chunk, n - s);
    const Eigen::MatrixXd out = pilot.forward_batch(ds.points.middleCols(s, len));
    for (Eigen::Index j = 0; j < len; ++j) w[static_cast<std::size_t>(s + j)] = out(0, j);
  }
  return w;
}

// Applies the well-predicted filter and the [ell,u] trim, equalises classes
// and attaches proxy distances.
LabeledDataset finish_split(const LabeledDataset& ds, const std::vector<double>& w, const ProxyDistanceModel& model,
                            std::uint64_t seed, MnistPrepStats& stats) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (zero_one_loss(w[i], ds.labels[i]) != 0) {
      ++stats.misclassified;
    } else if (w[i] >= model.ell && w[i] <= model.u) {
      ++stats.trimmed;
    } else {
      kept.push_back(i);
    }
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (const auto i : kept) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  const std::size_t m = std::min(by_class[0].size(), by_class[1].size());
  std::vector<std::size_t> final_idx;
  for (auto& cls : by_class) {
    if (cls.size() > m) {
      stats.balanced_drop += cls.size() - m;
      CounterRng rng(derive_seed({seed, cls.size()}));
      for (std::size_t i = 0; i < m; ++i) std::swap(cls[i], cls[i + rng.below(cls.size() - i)]);
      cls.resize(m);
    }
    final_idx.insert(final_idx.end(), cls.begin(), cls.end());
  }
  std::sort(final_idx.begin(), final_idx.end());
  LabeledDataset out = ds.select(final_idx);
  out.distances.resize(out.size());
  for (std::size_t j = 0; j < final_idx.size(); ++j) {
    const double t = rescale_map(w[final_idx[j]], model);
    out.distances[j] = std::abs(0.5 - t);
  }
  out.meta.stage = "proxy";
  return out;
}

}  // namespace

MnistPrepResult mnist_prepare(const LabeledDataset& train_raw, const LabeledDataset& test_raw,
                              const MnistPrepOptions& opts) {
  MnistPrepResult res;
  res.train_stats.loaded = train_raw.size();
  res.test_stats.loaded = test_raw.size();

  const LabeledDataset train_s = smote_balance(train_raw, opts.smote_k, derive_seed({opts.seed, 1}));
  const LabeledDataset test_s = smote_balance(test_raw, opts.smote_k, derive_seed({opts.seed, 2}));
  res.train_stats.class0_after_smote = train_s.count_label(0);
  res.train_stats.class1_after_smote = train_s.count_label(1);
  res.test_stats.class0_after_smote = test_s.count_label(0);
  res.test_stats.class1_after_smote = test_s.count_label(1);

  TrainConfig pcfg = opts.pilot;
  pcfg.seed = derive_seed({opts.seed, 3});
  spdlog::info("training pilot on {} points", train_s.size());
  res.model.pilot = fit_pilot(train_s, pcfg);

  const auto w_train = pilot_outputs(res.model.pilot, train_s);
  const auto w_test = pilot_outputs(res.model.pilot, test_s);

  std::vector<double> good_w;
  std::vector<int> good_y;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train_s.size(); ++i) {
    if (zero_one_loss(w_train[i], train_s.labels[i]) == 0) {
      ++correct;
      good_w.push_back(w_train[i]);
      good_y.push_back(train_s.labels[i]);
    }
  }
  res.train_stats.pilot_accuracy = static_cast<double>(correct) / static_cast<double>(train_s.size());
  const Thresholds th = calibrate_thresholds(good_w, good_y);
  res.model.ell = th.ell;
  res.model.u = th.u;
  res.model.w_min = *std::min_element(good_w.begin(), good_w.end());
  res.model.w_max = *std::max_element(good_w.begin(), good_w.end());
  res.model.validate();
  res.train_stats.expected_trim = th.k;

  res.train = finish_split(train_s, w_train, res.model, derive_seed({opts.seed, 4}), res.train_stats);

  std::size_t test_correct = 0;
  for (std::size_t i = 0; i < test_s.size(); ++i) test_correct += zero_one_loss(w_test[i], test_s.labels[i]) == 0;
  res.test_stats.pilot_accuracy = static_cast<double>(test_correct) / static_cast<double>(test_s.size());
  // Test outputs may fall outside the training range; clamp silently here.
  std::vector<double> w_test_clamped = w_test;
  for (auto& v : w_test_clamped) v = std::clamp(v, res.model.w_min, res.model.w_max);
  res.test = finish_split(test_s, w_test_clamped, res.model, derive_seed({opts.seed, 5}), res.test_stats);
  return res;
}

}  // namespace barron
