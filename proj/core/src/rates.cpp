#include "barron/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "barron/dataset.hpp"
#include "barron/errors.hpp"
#include "barron/stats.hpp"

namespace barron {

namespace {

std::uint64_t checked_ceil(long double v, const char* what) {
  if (!std::isfinite(static_cast<double>(v)) || v >= 9.2e18L) {
    throw OverflowError(std::string("schedule: ") + what + " exceeds the 64-bit range");
  }
  return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

ScheduleParams schedule(std::uint64_t n, std::size_t d, std::size_t pieces, double gamma, double alpha, double c1,
                        double c2, double c3) {
  if (n < 1 || d < 2 || pieces < 1) throw ParameterError("schedule needs n >= 1, d >= 2, M >= 1");
  if (!(gamma > 0.0) || !(alpha > 0.0) || !(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0)) {
    throw ParameterError("schedule constants must be positive");
  }
  ScheduleParams p{n, d, pieces, gamma, alpha, c1, c2, c3, 0, 0, 0, 0};
  const long double g = gamma;
  const long double md = static_cast<long double>(pieces) * static_cast<long double>(d);
  const long double cmax = std::max(c2, c3);
  const long double raw = std::pow(7.0L * md, 2.0L / g) * static_cast<long double>(d - 1) * c1 * c1 *
                          std::pow(cmax, 2.0L / g) * std::pow(static_cast<long double>(n), 2.0L / (2.0L + g));
  p.n_hat = checked_ceil(raw, "N_hat");
  const long double nh = static_cast<long double>(p.n_hat);
  p.n_total = checked_ceil(static_cast<long double>(pieces) * (4.0L * (d + 1) + nh + 1.0L) + d + 1.0L, "N_n");
  p.w_cap = checked_ceil(41.0L * md * static_cast<long double>(d) * nh, "W_n");
  const long double ratio = nh / c1;
  p.b_cap = checked_ceil((1.0L + std::sqrt(static_cast<long double>(c1))) *
                             (7.0L + ratio + std::pow(ratio, g / static_cast<long double>(alpha))),
                         "B_n");
  return p;
}

double entropy_bound(double delta, std::size_t d, std::size_t /*width*/, std::uint64_t weights, double magnitude) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("entropy_bound: delta must lie in (0,1]");
  if (weights < 1) throw ParameterError("entropy_bound: W must be >= 1");
  if (!(magnitude > 0.0)) throw ParameterError("entropy_bound: B must be positive");
  const double w = static_cast<double>(weights);
  const double big = std::max(static_cast<double>(d), w);
  return w * (10.0 + std::log(1.0 / delta) + 5.0 * std::log(std::ceil(magnitude)) + 5.0 * std::log(big));
}

double theorem1_error_bound(std::size_t d, std::size_t pieces, std::size_t width, double gamma, double c1,
                            double c2, double c3) {
  if (d < 2 || width < 1) throw ParameterError("theorem1_error_bound needs d >= 2 and N >= 1");
  return 3.5 * static_cast<double>(pieces) * static_cast<double>(d) *
         std::pow(static_cast<double>(d - 1), gamma / 2.0) * std::pow(c1, gamma) *
         std::pow(static_cast<double>(width), -gamma / 2.0) * std::max(c2, c3);
}

double theoretical_rate(double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("theoretical_rate: gamma must be positive");
  return -gamma / (2.0 + gamma);
}

// ---------------------------------------------------------------------------
// CSV

std::string to_csv_row(const RiskRecord& r) {
  std::ostringstream out;
  out << r.d << ',' << format_double(r.gamma) << ',' << r.n << ',' << r.iteration << ',' << r.seed << ','
      << format_double(r.hinge_risk) << ',' << format_double(r.zero_one_risk) << ',' << r.epochs_run << ','
      << format_double(r.wall_seconds) << ',' << r.config_hash;
  return out.str();
}

RiskRecord risk_record_from_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 9 && f.size() != 10) throw FormatError("risk CSV row has " + std::to_string(f.size()) + " fields");
  try {
    RiskRecord r;
    r.d = std::stoul(f[0]);
    r.gamma = std::stod(f[1]);
    r.n = std::stoul(f[2]);
    r.iteration = std::stoul(f[3]);
    r.seed = std::stoull(f[4]);
    r.hinge_risk = std::stod(f[5]);
    r.zero_one_risk = std::stod(f[6]);
    r.epochs_run = std::stoul(f[7]);
    r.wall_seconds = std::stod(f[8]);
    if (f.size() == 10) r.config_hash = f[9];
    return r;
  } catch (const std::logic_error& e) {
    throw FormatError("risk CSV row '" + line + "': " + e.what());
  }
}

std::vector<RiskRecord> read_risk_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line.rfind("d,gamma,n,iteration,seed,hinge_risk,zero_one_risk,epochs_run,wall_seconds", 0) != 0) {
    throw FormatError("unexpected risk CSV header '" + line + "'");
  }
  std::vector<RiskRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(risk_record_from_csv_row(line));
  }
  return out;
}

std::vector<RiskRecord> read_risk_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_risk_csv(in);
}

void write_risk_csv(const std::vector<RiskRecord>& records, std::ostream& out) {
  out << kRiskCsvHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

// ---------------------------------------------------------------------------
// Rate fits

RateFit fit_rate(const std::vector<RiskRecord>& records, RiskField field) {
  if (records.empty()) throw FitError("fit_rate: no records");
  RateFit fit;
  fit.d = records.front().d;
  fit.gamma = records.front().gamma;
  std::map<std::size_t, std::pair<double, std::size_t>> by_n;
  for (const auto& r : records) {
    if (r.d != fit.d || r.gamma != fit.gamma) throw FitError("fit_rate: records span several (d, gamma) groups");
    auto& acc = by_n[r.n];
    acc.first += field == RiskField::hinge ? r.hinge_risk : r.zero_one_risk;
    acc.second += 1;
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [n, acc] : by_n) {
    const double mean = acc.first / static_cast<double>(acc.second);
    if (!(mean > 0.0)) {
      spdlog::warn("fit_rate: d={} gamma={} n={} has zero mean risk; dropped", fit.d, fit.gamma, n);
      fit.dropped_sizes.push_back(n);
      continue;
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(mean));
  }
  if (lx.size() < 3) {
    throw FitError("fit_rate: only " + std::to_string(lx.size()) + " sizes with positive mean risk");
  }
  const auto line = ordinary_least_squares(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.std_error = line.slope_stderr;
  fit.n_points = line.n;
  return fit;
}

std::vector<RateFit> fit_rates_by_group(const std::vector<RiskRecord>& records, RiskField field) {
  std::map<std::pair<std::size_t, double>, std::vector<RiskRecord>> groups;
  for (const auto& r : records) groups[{r.d, r.gamma}].push_back(r);
  std::vector<RateFit> fits;
  for (const auto& [key, group] : groups) {
    try {
      fits.push_back(fit_rate(group, field));
    } catch (const FitError& e) {
      spdlog::warn("skipping d={} gamma={}: {}", key.first, key.second, e.what());
    }
  }
  return fits;
}

nlohmann::json rate_fit_to_json(const RateFit& fit) {
  return {{"d", fit.d},
          {"gamma", fit.gamma},
          {"slope", fit.slope},
          {"stderr", fit.std_error},
          {"theoretical", theoretical_rate(fit.gamma)},
          {"n_points", fit.n_points}};
}

}  // namespace barron
