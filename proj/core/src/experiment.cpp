#include "barron/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <spdlog/spdlog.h>

#include "barron/construction.hpp"
#include "barron/errors.hpp"
#include "barron/geometry.hpp"
#include "barron/rates.hpp"
#include "barron/rng.hpp"
#include "barron/sampler.hpp"

namespace barron {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (d < 2) throw ConfigError("d must be >= 2");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  const auto s = size_list();
  if (s.empty()) throw ConfigError("sizes must be non-empty");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] <= s[i - 1]) throw ConfigError("sizes must be strictly increasing");
  }
  if (s.front() < 1) throw ConfigError("sizes must be >= 1");
  for (const double g : gamma_list()) {
    if (!(g > 0.0)) throw ConfigError("gammas must be positive");
  }
  if (pool_train < 1 || pool_test < 1) throw ConfigError("pool sizes must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (train_csv.empty() != test_csv.empty()) throw ConfigError("train_csv and test_csv must be given together");
  const double c = neighborhood_radius();
  if (!(c > 0.0 && c <= 0.5)) throw ConfigError("c_d must lie in (0, 1/2]");
  trainer.validate();
}

std::vector<double> ExperimentConfig::gamma_list() const { return gammas.empty() ? kGammaGrid : gammas; }

std::vector<std::size_t> ExperimentConfig::size_list() const {
  if (!sizes.empty()) return sizes;
  try {
    return size_grid(d).train;
  } catch (const ConfigError&) {
    throw ConfigError("no default size grid for d=" + std::to_string(d) + "; set sizes");
  }
}

std::size_t ExperimentConfig::test_target() const {
  if (test_size > 0) return test_size;
  try {
    return size_grid(d).test;
  } catch (const ConfigError&) {
    return 1;
  }
}

double ExperimentConfig::neighborhood_radius() const { return c_d > 0.0 ? c_d : default_neighborhood_radius(d); }

namespace {

json trainer_to_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"max_epochs", t.max_epochs},
          {"patience", t.patience},
          {"min_delta", t.min_delta},
          {"batch_size", t.batch_size}};
}

// Fields that change results; out_dir, csv_name and workers are excluded.
json result_fields(const ExperimentConfig& c) {
  return {{"d", c.d},
          {"gammas", c.gamma_list()},
          {"sizes", c.size_list()},
          {"iterations", c.iterations},
          {"master_seed", c.master_seed},
          {"pool_train", c.pool_train},
          {"pool_test", c.pool_test},
          {"test_size", c.test_target()},
          {"c_d", c.neighborhood_radius()},
          {"max_width", c.max_width},
          {"trainer", trainer_to_json(c.trainer)},
          {"train_csv", c.train_csv.string()},
          {"test_csv", c.test_csv.string()}};
}

}  // namespace

std::string ExperimentConfig::hash() const {
  const std::string text = result_fields(*this).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;   // FNV-1a
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

json config_to_json(const ExperimentConfig& cfg) {
  json j = result_fields(cfg);
  j["out_dir"] = cfg.out_dir.string();
  j["csv_name"] = cfg.csv_name;
  j["workers"] = cfg.workers;
  return j;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  try {
    if (j.contains("d")) c.d = j.at("d").get<std::size_t>();
    if (j.contains("gammas")) c.gammas = j.at("gammas").get<std::vector<double>>();
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("iterations")) c.iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("pool_train")) c.pool_train = j.at("pool_train").get<std::size_t>();
    if (j.contains("pool_test")) c.pool_test = j.at("pool_test").get<std::size_t>();
    if (j.contains("test_size")) c.test_size = j.at("test_size").get<std::size_t>();
    if (j.contains("c_d")) c.c_d = j.at("c_d").get<double>();
    if (j.contains("max_width")) c.max_width = j.at("max_width").get<std::size_t>();
    if (j.contains("train_csv")) c.train_csv = j.at("train_csv").get<std::string>();
    if (j.contains("test_csv")) c.test_csv = j.at("test_csv").get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("csv_name")) c.csv_name = j.at("csv_name").get<std::string>();
    if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
    if (j.contains("trainer")) {
      const auto& t = j.at("trainer");
      if (t.contains("learning_rate")) c.trainer.learning_rate = t.at("learning_rate").get<double>();
      if (t.contains("max_epochs")) c.trainer.max_epochs = t.at("max_epochs").get<std::size_t>();
      if (t.contains("patience")) c.trainer.patience = t.at("patience").get<std::size_t>();
      if (t.contains("min_delta")) c.trainer.min_delta = t.at("min_delta").get<double>();
      if (t.contains("batch_size")) c.trainer.batch_size = t.at("batch_size").get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return config_from_json(json::parse(in), std::move(base));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t d, std::size_t gamma_index, std::size_t size_index,
                        std::size_t iteration) {
  return derive_seed({master, d, gamma_index, size_index, iteration});
}

LabeledDataset margin_pool(std::size_t d, double gamma, double c_d, std::size_t target, std::size_t round_size,
                           std::uint64_t seed) {
  if (round_size < 1) throw ParameterError("margin_pool: round size must be >= 1");
  const MarginConfig base_cfg{gamma, c_d, 0};
  base_cfg.validate();
  LabeledDataset pool(d);
  for (std::uint64_t round = 0;; ++round) {
    const LabeledDataset base = sphere_shell_dataset(d, round_size, derive_seed({seed, round, 0}));
    MarginConfig mc = base_cfg;
    mc.seed = derive_seed({seed, round, 1});
    pool = round == 0 ? margin_reject(base, mc) : concatenate(pool, margin_reject(base, mc));
    if (pool.size() >= target) break;
    if (round > 10000) throw SizeError("margin_pool: retention too low to reach the target size");
  }
  pool.meta.gamma = gamma;
  pool.meta.seed = seed;
  pool.meta.stage = "margin";
  return pool;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

using CellKey = std::tuple<std::size_t, double, std::size_t, std::size_t>;   // d, gamma, n, iteration

CellKey key_of(const RiskRecord& r) { return {r.d, r.gamma, r.n, r.iteration}; }

std::vector<RiskRecord> read_existing(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path) || std::filesystem::file_size(path) == 0) return {};
  return read_risk_csv(path);
}

void rewrite_sorted(std::vector<RiskRecord> rows, const std::vector<double>& gammas,
                    const std::filesystem::path& path) {
  auto gamma_rank = [&](double g) {
    const auto it = std::find(gammas.begin(), gammas.end(), g);
    return static_cast<std::size_t>(it - gammas.begin());
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const RiskRecord& a, const RiskRecord& b) {
    return std::make_tuple(a.d, gamma_rank(a.gamma), a.gamma, a.n, a.iteration) <
           std::make_tuple(b.d, gamma_rank(b.gamma), b.gamma, b.n, b.iteration);
  });
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp.string());
    write_risk_csv(rows, out);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

SweepSummary run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto gammas = cfg.gamma_list();
  const auto sizes = cfg.size_list();
  const double c_d = cfg.neighborhood_radius();
  const std::string hash = cfg.hash();
  std::filesystem::create_directories(cfg.out_dir);

  SweepSummary summary;
  summary.csv = cfg.csv_path();
  summary.cells_total = gammas.size() * sizes.size() * cfg.iterations;

  const auto existing = read_existing(summary.csv);
  std::set<CellKey> done;
  for (const auto& r : existing) {
    done.insert(key_of(r));
    if (!r.config_hash.empty() && r.config_hash != hash) {
      spdlog::warn("{}: row d={} gamma={} n={} was produced by config {}", summary.csv.string(), r.d, r.gamma, r.n,
                   r.config_hash);
    }
  }

  auto missing = [&](std::size_t gi, std::size_t ni, std::size_t it) {
    return done.count({cfg.d, gammas[gi], sizes[ni], it}) == 0;
  };

  // Shared base data for prepared-dataset sweeps.
  LabeledDataset file_train;
  LabeledDataset file_test;
  if (!cfg.train_csv.empty()) {
    file_train = read_csv(cfg.train_csv);
    file_test = read_csv(cfg.test_csv);
    if (file_train.d != cfg.d || file_test.d != cfg.d) throw ConfigError("prepared dataset dimension != d");
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;   // (gamma index, iteration)
  std::set<std::size_t> gammas_needed;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      bool any = false;
      for (std::size_t ni = 0; ni < sizes.size(); ++ni) any = any || missing(gi, ni, it);
      if (any) {
        tasks.emplace_back(gi, it);
        gammas_needed.insert(gi);
      }
    }
  }
  summary.cells_skipped = done.size() > summary.cells_total ? summary.cells_total : done.size();

  // One gamma-matched test set per gamma.
  std::map<std::size_t, LabeledDataset> tests;
  for (const std::size_t gi : gammas_needed) {
    const std::uint64_t seed = derive_seed({cfg.master_seed, cfg.d, gi, 0x7e57ULL});
    if (file_test.empty()) {
      tests[gi] = margin_pool(cfg.d, gammas[gi], c_d, cfg.test_target(), cfg.pool_test, seed);
    } else {
      tests[gi] = margin_reject(file_test, MarginConfig{gammas[gi], c_d, seed});
    }
    if (tests[gi].empty()) throw SizeError("empty test set for gamma=" + format_double(gammas[gi]));
  }

  std::mutex io_mutex;
  std::ofstream out;
  {
    const bool fresh = !std::filesystem::exists(summary.csv) || std::filesystem::file_size(summary.csv) == 0;
    out.open(summary.csv, std::ios::app);
    if (!out) throw Error("cannot open " + summary.csv.string());
    if (fresh) out << kRiskCsvHeader << '\n' << std::flush;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> run{0};
  std::atomic<std::size_t> failed{0};

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const auto [gi, it] = tasks[t];
      const double gamma = gammas[gi];
      LabeledDataset pool;
      try {
        const std::uint64_t pseed = derive_seed({cfg.master_seed, cfg.d, gi, it, 0x9001ULL});
        if (file_train.empty()) {
          pool = margin_pool(cfg.d, gamma, c_d, sizes.back(), cfg.pool_train, pseed);
        } else {
          pool = margin_reject(file_train, MarginConfig{gamma, c_d, pseed});
        }
      } catch (const std::exception& e) {
        spdlog::error("pool for gamma={} iteration={} failed: {}", gamma, it, e.what());
        for (std::size_t ni = 0; ni < sizes.size(); ++ni) failed += missing(gi, ni, it);
        continue;
      }
      for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
        if (!missing(gi, ni, it)) continue;
        const std::size_t n = sizes[ni];
        const std::uint64_t seed = cell_seed(cfg.master_seed, cfg.d, gi, ni, it);
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const LabeledDataset train_ds = subsample(pool, n, derive_seed({seed, 1}));
          std::size_t width = experiment_width(n, gamma);
          if (cfg.max_width > 0) width = std::min(width, cfg.max_width);
          const std::vector<std::size_t> arch{cfg.d, 3 * width, 2 * width, width, 1};
          const Network init = init_network(arch, derive_seed({seed, 2}));
          TrainConfig tc = cfg.trainer;
          tc.seed = derive_seed({seed, 3});
          const TrainResult res = train(init, train_ds, tc);
          const RiskPair risks = evaluate_risks(res.net, tests.at(gi));
          const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          RiskRecord rec{cfg.d, gamma, n, it, seed, risks.hinge, risks.zero_one, res.epochs_run, secs, hash};
          {
            std::lock_guard lock(io_mutex);
            out << to_csv_row(rec) << '\n' << std::flush;
          }
          ++run;
          spdlog::debug("d={} gamma={} n={} it={} hinge={:.4g} 0-1={:.4g} epochs={}", cfg.d, gamma, n, it,
                        rec.hinge_risk, rec.zero_one_risk, rec.epochs_run);
        } catch (const std::exception& e) {
          ++failed;
          spdlog::error("cell d={} gamma={} n={} iteration={} failed: {}", cfg.d, gamma, n, it, e.what());
        }
      }
    }
  };

  {
    const unsigned nw = std::max(1U, std::min<unsigned>(cfg.workers, static_cast<unsigned>(tasks.size())));
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
  }
  out.close();

  auto rows = read_risk_csv(summary.csv);
  std::size_t all_violations = 0;
  for (const auto& r : rows) all_violations += r.zero_one_risk > r.hinge_risk;
  rewrite_sorted(std::move(rows), gammas, summary.csv);

  summary.cells_run = run;
  summary.cells_failed = failed;
  summary.hinge_violations = all_violations;
  return summary;
}

// ---------------------------------------------------------------------------
// Construct and verify

namespace {

json error_report(const std::string& kind, const std::string& message) {
  return {{"ok", false}, {"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

json construct_verify(const json& spec_json, const VerifyOptions& opts) {
  ClassifierSpec spec;
  try {
    spec = spec_from_json(spec_json);
    spec.validate();
  } catch (const json::exception& e) {
    return error_report("spec", e.what());
  } catch (const Error& e) {
    return error_report("spec", e.what());
  }
  VerifyOptions o = opts;
  if (spec_json.contains("measure")) {
    const auto& m = spec_json.at("measure");
    o.c2 = m.value("c2", o.c2);
    o.c3 = m.value("c3", o.c3);
  }

  const Network net = build_classifier(spec);
  const BoundReport bounds = verify_theorem1_bounds(net, spec);
  const std::size_t d = spec.dim();
  const double delta = spec.delta();
  const double deltahat = spec.deltahat();

  // Range and interior exactness on one uniform sample.
  Eigen::MatrixXd X(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(o.n_points));
  CounterRng rng(derive_seed({o.seed, 0x4a11ULL}));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = rng.uniform();
  }
  const Eigen::MatrixXd Y = net.forward_batch(X);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t qualifying = 0;
  std::size_t interior_fail = 0;
  double interior_max_err = 0.0;
  const bool have_boundary =
      std::all_of(spec.pieces.begin(), spec.pieces.end(), [](const CoverPiece& p) { return p.boundary.has_value(); });
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double y = Y(0, j);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
    if (!have_boundary) continue;
    const std::span<const double> x(X.col(j).data(), d);
    for (const auto& piece : spec.pieces) {
      if (!piece.contains(x)) continue;
      if (piece.face_distance(x) > deltahat && piece.vertical_distance(x) > 2.0 * delta) {
        ++qualifying;
        const double err = std::abs(y - piece.side(x));
        interior_max_err = std::max(interior_max_err, err);
        if (!(err < 1e-9)) ++interior_fail;
      }
      break;
    }
  }
  const bool range_ok = lo >= -o.range_slack && hi <= 1.0 + o.range_slack;

  // Disagreement under the uniform measure.
  const auto est = estimate_disagreement(
      net, [&](std::span<const double> x) { return indicator(spec, x); }, uniform_cube_sampler(d),
      McOptions{o.n_mc, derive_seed({o.seed, 0xd15aULL}), o.workers});
  const double bound = theorem1_error_bound(d, spec.pieces.size(), spec.width, spec.gamma, spec.c1, o.c2, o.c3);
  const bool disagreement_ok = est.estimate <= bound + 3.0 * est.std_error;

  json report;
  report["bounds"] = bound_report_to_json(bounds);
  report["delta"] = delta;
  report["deltahat"] = deltahat;
  report["range"] = {{"points", o.n_points}, {"min", lo}, {"max", hi}, {"slack", o.range_slack}, {"ok", range_ok}};
  report["interior"] = {{"checked", have_boundary},
                        {"qualifying", qualifying},
                        {"failures", interior_fail},
                        {"max_abs_error", interior_max_err},
                        {"ok", interior_fail == 0}};
  report["disagreement"] = {{"n_mc", est.samples},    {"estimate", est.estimate},
                            {"stderr", est.std_error}, {"bound", bound},
                            {"c2", o.c2},              {"c3", o.c3},
                            {"ok", disagreement_ok}};
  report["ok"] = bounds.all_ok() && range_ok && interior_fail == 0 && disagreement_ok;
  return report;
}

json run_construct_verify(const std::filesystem::path& spec_path, const VerifyOptions& opts) {
  std::ifstream in(spec_path);
  if (!in) return error_report("io", "cannot open " + spec_path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    json r = error_report("parse", e.what());
    r["error"]["line"] = line;
    r["error"]["column"] = column;
    return r;
  }
  json report = construct_verify(j, opts);
  report["spec"] = spec_path.string();
  return report;
}

}  // namespace barron
