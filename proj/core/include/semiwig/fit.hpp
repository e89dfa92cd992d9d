#pragma once

#include <cstddef>
#include <span>

namespace semiwig {

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root-mean-square deviation from the line
  std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log y against log x; every entry must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace semiwig
