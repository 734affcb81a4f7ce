#pragma once

#include <span>
#include <vector>

namespace wavedim {

struct Monomial {
  double coefficient = 0.0;
  std::vector<int> powers;  ///< one non-negative exponent per variable
};

/// Multivariate polynomial potential F0(u), u in R^N, with analytic gradient and Hessian.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int variables, std::vector<Monomial> terms);

  /// sum_r coefficient * u_r^power, the isotropic potential used by the stock scenarios.
  static Polynomial separable_power(int variables, double coefficient, int power);

  int variables() const { return variables_; }
  int degree() const;
  bool empty() const { return terms_.empty(); }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(std::span<const double> u) const;
  /// out[r] = dF0/du_r
  void gradient(std::span<const double> u, std::span<double> out) const;
  /// out[r*N + s] = d^2 F0 / du_r du_s
  void hessian(std::span<const double> u, std::span<double> out) const;

  /// Heuristic admissibility check: even top degree whose homogeneous part is
  /// positive on a deterministic sample of unit directions (non-negative for degree 2).
  bool bounded_below() const;

 private:
  int variables_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace wavedim
