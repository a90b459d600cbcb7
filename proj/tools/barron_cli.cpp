// barron: sampling, construction checks and learning-rate sweeps.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "barron/construction.hpp"
#include "barron/dataset.hpp"
#include "barron/errors.hpp"
#include "barron/experiment.hpp"
#include "barron/geometry.hpp"
#include "barron/mnist.hpp"
#include "barron/rates.hpp"
#include "barron/rng.hpp"
#include "barron/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  fs::path out_dir = ".";
  fs::path config;
  bool verbose = false;
};

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw barron::Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path resolve(const Globals& g, const fs::path& p, const std::string& fallback) {
  if (p.empty()) return g.out_dir / fallback;
  return p.is_absolute() || p.has_parent_path() ? p : g.out_dir / p;
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::size_t d = 3;
  std::optional<double> gamma;
  std::size_t n = 1000;
  std::size_t pool = 30000;
  double c_d = 0.0;
  fs::path out;
};

int cmd_sample(const Globals& g, const SampleArgs& a) {
  const std::uint64_t seed = g.seed.value_or(0);
  barron::LabeledDataset ds;
  if (a.gamma) {
    const double c_d = a.c_d > 0.0 ? a.c_d : barron::default_neighborhood_radius(a.d);
    const auto pool = barron::margin_pool(a.d, *a.gamma, c_d, a.n, std::max(a.pool, a.n), seed);
    ds = barron::subsample(pool, a.n, barron::derive_seed({seed, 1}));
  } else {
    ds = barron::sphere_shell_dataset(a.d, a.n, seed);
  }
  const fs::path out = resolve(g, a.out, "sample.csv");
  barron::write_csv(ds, out);
  spdlog::info("wrote {} points to {}", ds.size(), out.string());
  return 0;
}

struct MarginArgs {
  fs::path in;
  std::size_t d = 3;
  double gamma = 1.0;
  std::size_t n = 30000;
  double c_d = 0.0;
  double eps_min = 1e-3;
  double eps_max = 1e-1;
  std::size_t points = 12;
  fs::path out;
};

int cmd_margin_check(const Globals& g, const MarginArgs& a) {
  barron::LabeledDataset ds;
  if (!a.in.empty()) {
    ds = barron::read_csv(a.in);
  } else {
    const std::uint64_t seed = g.seed.value_or(0);
    const double c_d = a.c_d > 0.0 ? a.c_d : barron::default_neighborhood_radius(a.d);
    ds = barron::margin_reject(barron::sphere_shell_dataset(a.d, a.n, seed),
                               barron::MarginConfig{a.gamma, c_d, barron::derive_seed({seed, 1})});
  }
  if (!ds.has_distances()) throw barron::FormatError("margin-check needs a dist column");
  const auto eps = barron::log_grid(a.eps_min, a.eps_max, a.points);
  const auto mass = barron::empirical_margin_masses(ds, eps);
  const fs::path out = resolve(g, a.out, "margin.csv");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out);
  f << "eps,mass,stderr\n";
  const double n = static_cast<double>(ds.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double se = std::sqrt(mass[i] * (1.0 - mass[i]) / n);
    f << barron::format_double(eps[i]) << ',' << barron::format_double(mass[i]) << ','
      << barron::format_double(se) << '\n';
  }
  const double slope = barron::fit_margin_exponent(eps, mass);
  std::printf("points %zu  fitted margin exponent %.4f\n", ds.size(), slope);
  return 0;
}

struct MnistArgs {
  fs::path train_images;
  fs::path train_labels;
  fs::path test_images;
  fs::path test_labels;
  std::size_t k = 5;
  std::size_t pilot_epochs = 200;
};

int cmd_mnist_prep(const Globals& g, const MnistArgs& a) {
  const auto train = barron::load_idx(a.train_images, a.train_labels);
  const auto test = barron::load_idx(a.test_images, a.test_labels);
  barron::MnistPrepOptions opts;
  opts.smote_k = a.k;
  opts.seed = g.seed.value_or(0);
  opts.pilot = barron::pilot_config(opts.seed);
  opts.pilot.max_epochs = a.pilot_epochs;
  const auto res = barron::mnist_prepare(train, test, opts);
  fs::create_directories(g.out_dir);
  barron::write_csv(res.train, g.out_dir / "mnist_train.csv");
  barron::write_csv(res.test, g.out_dir / "mnist_test.csv");
  write_json(barron::network_to_json(res.model.pilot), g.out_dir / "mnist_pilot.json");
  auto stats = [](const barron::MnistPrepStats& s) {
    return json{{"loaded", s.loaded},
                {"class0_after_smote", s.class0_after_smote},
                {"class1_after_smote", s.class1_after_smote},
                {"misclassified", s.misclassified},
                {"trimmed", s.trimmed},
                {"expected_trim", s.expected_trim},
                {"balanced_drop", s.balanced_drop},
                {"pilot_accuracy", s.pilot_accuracy}};
  };
  const json summary{{"ell", res.model.ell},
                     {"u", res.model.u},
                     {"w_min", res.model.w_min},
                     {"w_max", res.model.w_max},
                     {"train", stats(res.train_stats)},
                     {"test", stats(res.test_stats)},
                     {"train_size", res.train.size()},
                     {"test_size", res.test.size()}};
  write_json(summary, g.out_dir / "mnist_prep.json");
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct VerifyArgs {
  fs::path spec;
  std::uint64_t n_mc = 1000000;
  std::size_t n_points = 100000;
  fs::path out;
};

int cmd_construct_verify(const Globals& g, const VerifyArgs& a) {
  barron::VerifyOptions opts;
  opts.n_mc = a.n_mc;
  opts.n_points = a.n_points;
  opts.seed = g.seed.value_or(0);
  opts.workers = g.workers;
  const json report = barron::run_construct_verify(a.spec, opts);
  write_json(report, resolve(g, a.out, "construct_verify.json"));
  std::cout << report.dump(2) << '\n';
  return report.value("ok", false) ? 0 : 1;
}

struct SweepArgs {
  std::optional<std::size_t> d;
  std::vector<double> gammas;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> max_width;
  std::optional<double> lr;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> batch_size;
  fs::path train_csv;
  fs::path test_csv;
  fs::path out;
};

int cmd_train_sweep(const Globals& g, const SweepArgs& a) {
  barron::ExperimentConfig cfg;
  if (!g.config.empty()) cfg = barron::load_config(g.config);
  if (a.d) cfg.d = *a.d;
  if (!a.gammas.empty()) cfg.gammas = a.gammas;
  if (!a.sizes.empty()) cfg.sizes = a.sizes;
  if (a.iterations) cfg.iterations = *a.iterations;
  if (a.max_width) cfg.max_width = *a.max_width;
  if (a.lr) cfg.trainer.learning_rate = *a.lr;
  if (a.max_epochs) cfg.trainer.max_epochs = *a.max_epochs;
  if (a.patience) cfg.trainer.patience = *a.patience;
  if (a.batch_size) cfg.trainer.batch_size = *a.batch_size;
  if (!a.train_csv.empty()) cfg.train_csv = a.train_csv;
  if (!a.test_csv.empty()) cfg.test_csv = a.test_csv;
  if (g.seed) cfg.master_seed = *g.seed;
  cfg.workers = g.workers;
  if (g.out_dir != ".") cfg.out_dir = g.out_dir;
  if (!a.out.empty()) {
    if (a.out.has_parent_path()) cfg.out_dir = a.out.parent_path();
    cfg.csv_name = a.out.filename().string();
  }
  fs::create_directories(cfg.out_dir);
  write_json(barron::config_to_json(cfg), cfg.out_dir / (cfg.csv_name + ".config.json"));
  const auto s = barron::run_sweep(cfg);
  std::printf("cells %zu  run %zu  skipped %zu  failed %zu  hinge violations %zu  -> %s\n", s.cells_total,
              s.cells_run, s.cells_skipped, s.cells_failed, s.hinge_violations, s.csv.string().c_str());
  return s.ok() ? 0 : 1;
}

struct ReportArgs {
  fs::path in;
  std::string risk = "zero_one";
  fs::path out;
};

int cmd_report(const Globals& g, const ReportArgs& a) {
  const auto records = barron::read_risk_csv(a.in);
  const auto field = a.risk == "hinge" ? barron::RiskField::hinge : barron::RiskField::zero_one;
  json out = json::array();
  for (const auto& fit : barron::fit_rates_by_group(records, field)) out.push_back(barron::rate_fit_to_json(fit));
  write_json(out, resolve(g, a.out, "report.json"));
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit ReLU classifiers and margin-dependent learning rates"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");
  app.add_option("--config", g.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sphere-shell sample, optionally margin-rejected");
  sample->add_option("--d", sa.d)->required();
  sample->add_option("--gamma", sa.gamma, "Margin exponent; omit for the raw shell sample");
  sample->add_option("--n", sa.n)->required();
  sample->add_option("--pool", sa.pool, "Base points per generation round");
  sample->add_option("--c-d", sa.c_d, "Neighbourhood radius (default by d)");
  sample->add_option("--seed", g.seed, "Same as the global --seed");
  sample->add_option("--out", sa.out, "Output CSV");

  MarginArgs ma;
  auto* margin = app.add_subcommand("margin-check", "Empirical margin mass against eps");
  margin->add_option("--in", ma.in, "Dataset CSV with a dist column")->check(CLI::ExistingFile);
  margin->add_option("--d", ma.d);
  margin->add_option("--gamma", ma.gamma);
  margin->add_option("--n", ma.n, "Base pool size when generating");
  margin->add_option("--c-d", ma.c_d);
  margin->add_option("--eps-min", ma.eps_min);
  margin->add_option("--eps-max", ma.eps_max);
  margin->add_option("--points", ma.points);
  margin->add_option("--out", ma.out, "Output CSV (eps,mass,stderr)");

  MnistArgs na;
  auto* mnist = app.add_subcommand("mnist-prep", "Prepare the d=784 MNIST 0/1 data");
  mnist->add_option("--train-images", na.train_images)->required()->check(CLI::ExistingFile);
  mnist->add_option("--train-labels", na.train_labels)->required()->check(CLI::ExistingFile);
  mnist->add_option("--test-images", na.test_images)->required()->check(CLI::ExistingFile);
  mnist->add_option("--test-labels", na.test_labels)->required()->check(CLI::ExistingFile);
  mnist->add_option("--smote-k", na.k);
  mnist->add_option("--pilot-epochs", na.pilot_epochs);

  VerifyArgs va;
  auto* verify = app.add_subcommand("construct-verify", "Build a classifier from a spec and check it");
  verify->add_option("--spec", va.spec)->required();
  verify->add_option("--n-mc", va.n_mc, "Monte-Carlo points for the disagreement estimate");
  verify->add_option("--n-points", va.n_points, "Points for the range and interior checks");
  verify->add_option("--out", va.out, "Report JSON");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("train-sweep", "Train and evaluate over (gamma, n, iteration)");
  sweep->add_option("--d", wa.d);
  sweep->add_option("--gammas", wa.gammas)->delimiter(',');
  sweep->add_option("--sizes", wa.sizes)->delimiter(',');
  sweep->add_option("--iterations", wa.iterations);
  sweep->add_option("--max-width", wa.max_width, "Cap on N in (d,3N,2N,N,1)");
  sweep->add_option("--lr", wa.lr);
  sweep->add_option("--max-epochs", wa.max_epochs);
  sweep->add_option("--patience", wa.patience);
  sweep->add_option("--batch-size", wa.batch_size);
  sweep->add_option("--train-csv", wa.train_csv, "Prepared training pool (e.g. from mnist-prep)");
  sweep->add_option("--test-csv", wa.test_csv);
  sweep->add_option("--seed", g.seed, "Same as the global --seed");
  sweep->add_option("--out", wa.out, "Output CSV");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Fit log-log rates per (d, gamma)");
  report->add_option("--in", ra.in)->required()->check(CLI::ExistingFile);
  report->add_option("--risk", ra.risk)->check(CLI::IsMember({"zero_one", "hinge"}));
  report->add_option("--out", ra.out, "Output JSON");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*sample) return cmd_sample(g, sa);
    if (*margin) return cmd_margin_check(g, ma);
    if (*mnist) return cmd_mnist_prep(g, na);
    if (*verify) return cmd_construct_verify(g, va);
    if (*sweep) return cmd_train_sweep(g, wa);
    if (*report) return cmd_report(g, ra);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 2;
}
