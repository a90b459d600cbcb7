#pragma once

#include <cstddef>
#include <span>

namespace barron {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LineFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace barron
