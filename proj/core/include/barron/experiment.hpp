#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "barron/dataset.hpp"
#include "barron/trainer.hpp"

namespace barron {

/// Width cap on N used by default so a full d=3 sweep fits on one core.
inline constexpr std::size_t kDeskWidthCap = 16;

struct ExperimentConfig {
  std::size_t d = 3;
  std::vector<double> gammas;          // empty: the full gamma grid
  std::vector<std::size_t> sizes;      // empty: size_grid(d).train
  std::size_t iterations = 10;
  std::uint64_t master_seed = 0;
  std::size_t pool_train = 30000;      // base points per generation round
  std::size_t pool_test = 100000;
  std::size_t test_size = 0;           // retained test points; 0: size_grid(d).test, else one round
  double c_d = 0.0;                    // 0: default_neighborhood_radius(d)
  std::size_t max_width = kDeskWidthCap;   // cap on N in (d,3N,2N,N,1); 0 = uncapped
  TrainConfig trainer = desk_scale_config();
  // Prepared datasets (e.g. from mnist-prep) replace sphere-shell generation.
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  std::filesystem::path out_dir = ".";
  std::string csv_name = "risks.csv";
  unsigned workers = 1;

  void validate() const;
  std::vector<double> gamma_list() const;
  std::vector<std::size_t> size_list() const;
  double neighborhood_radius() const;
  std::size_t test_target() const;
  std::filesystem::path csv_path() const { return out_dir / csv_name; }
  /// 16 hex digits over every field that affects results.
  std::string hash() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Fields absent from `j` keep their value from `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

std::uint64_t cell_seed(std::uint64_t master, std::size_t d, std::size_t gamma_index, std::size_t size_index,
                        std::size_t iteration);

/// Sphere-shell points passed through margin rejection, generated in rounds
/// of `round_size` base points until at least `target` points survive.
LabeledDataset margin_pool(std::size_t d, double gamma, double c_d, std::size_t target, std::size_t round_size,
                           std::uint64_t seed);

struct SweepSummary {
  std::size_t cells_total = 0;
  std::size_t cells_run = 0;
  std::size_t cells_skipped = 0;
  std::size_t cells_failed = 0;
  std::size_t hinge_violations = 0;   // rows with zero_one_risk > hinge_risk
  std::filesystem::path csv;
  bool ok() const { return cells_failed == 0; }
};

/// Trains and evaluates every (gamma, n, iteration) cell, appending rows to
/// cfg.csv_path(). Cells already present are skipped; the file is rewritten
/// in grid order when the sweep ends.
SweepSummary run_sweep(const ExperimentConfig& cfg);

struct VerifyOptions {
  std::size_t n_points = 100000;     // range / interior sample
  std::uint64_t n_mc = 1000000;      // disagreement sample
  double c2 = 2.0;                   // margin constant of uniform measure
  double c3 = 1.0;                   // tube constant of uniform measure
  double range_slack = 1e-12;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Builds the classifier described by a spec file and checks bounds, range,
/// interior exactness and disagreement. Parse and validation failures are
/// returned as {"ok": false, "error": {...}} rather than thrown.
nlohmann::json run_construct_verify(const std::filesystem::path& spec_path, const VerifyOptions& opts);
nlohmann::json construct_verify(const nlohmann::json& spec_json, const VerifyOptions& opts);

}  // namespace barron
