#pragma once

#include <span>

namespace wavedim {

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(y) on log(x). Throws NumericFailure on non-positive values,
/// fewer than two points or a single distinct abscissa.
ScalingFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Least squares of log(quantity) on log(1/gamma); needs at least four points.
ScalingFit fit_scaling(std::span<const double> gammas, std::span<const double> quantity);

}  // namespace wavedim
