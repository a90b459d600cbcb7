#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace barron {

/// Network-size schedule as a function of the sample size n.
struct ScheduleParams {
  std::uint64_t n = 0;
  std::size_t d = 0;
  std::size_t pieces = 0;   // M
  double gamma = 0.0;
  double alpha = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  std::uint64_t n_hat = 0;     // shallow width per piece
  std::uint64_t n_total = 0;   // neuron budget
  std::uint64_t w_cap = 0;     // non-zero weight budget
  std::uint64_t b_cap = 0;     // parameter magnitude budget
};

/// Evaluates the four schedule formulas; the magnitude budget uses the
/// shallow width n_hat. Throws OverflowError when a value exceeds 2^63.
ScheduleParams schedule(std::uint64_t n, std::size_t d, std::size_t pieces, double gamma, double alpha, double c1,
                        double c2, double c3);

/// Covering-entropy bound W (10 + ln(1/delta) + 5 ln ceil(B) + 5 ln max{d, W}).
/// `width` is accepted for symmetry with the network class and does not
/// enter the formula.
double entropy_bound(double delta, std::size_t d, std::size_t width, std::uint64_t weights, double magnitude);

/// 3.5 M d (d-1)^(gamma/2) C1^gamma N^(-gamma/2) max{C2, C3}.
double theorem1_error_bound(std::size_t d, std::size_t pieces, std::size_t width, double gamma, double c1,
                            double c2, double c3);

/// Log-log slope -gamma/(2+gamma) of the learning rate.
double theoretical_rate(double gamma);

/// One trained-and-evaluated cell of a sweep.
struct RiskRecord {
  std::size_t d = 0;
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
  double hinge_risk = 0.0;
  double zero_one_risk = 0.0;
  std::size_t epochs_run = 0;
  double wall_seconds = 0.0;
  std::string config_hash;
};

inline constexpr const char* kRiskCsvHeader =
    "d,gamma,n,iteration,seed,hinge_risk,zero_one_risk,epochs_run,wall_seconds,config_hash";

std::string to_csv_row(const RiskRecord& r);
RiskRecord risk_record_from_csv_row(const std::string& line);
std::vector<RiskRecord> read_risk_csv(std::istream& in);
std::vector<RiskRecord> read_risk_csv(const std::filesystem::path& path);
void write_risk_csv(const std::vector<RiskRecord>& records, std::ostream& out);

enum class RiskField { hinge, zero_one };

struct RateFit {
  std::size_t d = 0;
  double gamma = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  std::size_t n_points = 0;
  std::vector<std::size_t> dropped_sizes;   // zero mean risk
};

/// OLS of log(mean risk over iterations) on log n for records of a single
/// (d, gamma) group. Sizes with zero mean risk are dropped; fewer than three
/// remaining sizes throws FitError.
RateFit fit_rate(const std::vector<RiskRecord>& records, RiskField field);

/// fit_rate for every (d, gamma) group, ordered by d then gamma. Groups that
/// cannot be fitted are skipped.
std::vector<RateFit> fit_rates_by_group(const std::vector<RiskRecord>& records, RiskField field);

/// {d, gamma, slope, stderr, theoretical, n_points}.
nlohmann::json rate_fit_to_json(const RateFit& fit);

}  // namespace barron
