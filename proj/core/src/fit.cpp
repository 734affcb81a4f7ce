#include "wavedim/fit.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "wavedim/error.hpp"

namespace wavedim {

ScalingFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("fit: abscissa and ordinate lengths differ");
  const std::size_t n = x.size();
  if (n < 2) throw NumericFailure("degenerate fit: need at least two points, got " + std::to_string(n));
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw NumericFailure("degenerate fit: non-positive value at point " + std::to_string(i));
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw NumericFailure("degenerate fit: all abscissae coincide");
  ScalingFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

ScalingFit fit_scaling(std::span<const double> gammas, std::span<const double> quantity) {
  if (gammas.size() < 4) throw NumericFailure("scaling fit needs at least four gamma values");
  std::vector<double> inv(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) throw InvalidInput("gamma values must be positive");
    inv[i] = 1.0 / gammas[i];
  }
  return fit_loglog(inv, quantity);
}

}  // namespace wavedim
