#include "wavedim/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wavedim/error.hpp"

namespace wavedim {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

int total_degree(const Monomial& m) { return std::accumulate(m.powers.begin(), m.powers.end(), 0); }

}  // namespace

Polynomial::Polynomial(int variables, std::vector<Monomial> terms) : variables_(variables), terms_(std::move(terms)) {
  if (variables_ < 1) throw InvalidInput("polynomial needs at least one variable");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.powers.size()) != variables_) {
      throw InvalidInput("monomial exponent count does not match the variable count");
    }
    if (std::any_of(t.powers.begin(), t.powers.end(), [](int p) { return p < 0; })) {
      throw InvalidInput("monomial exponents must be non-negative");
    }
  }
  std::erase_if(terms_, [](const Monomial& m) { return m.coefficient == 0.0; });
}

Polynomial Polynomial::separable_power(int variables, double coefficient, int power) {
  std::vector<Monomial> terms;
  for (int r = 0; r < variables; ++r) {
    Monomial m{coefficient, std::vector<int>(static_cast<std::size_t>(variables), 0)};
    m.powers[static_cast<std::size_t>(r)] = power;
    terms.push_back(std::move(m));
  }
  return Polynomial(variables, std::move(terms));
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, total_degree(t));
  return d;
}

double Polynomial::value(std::span<const double> u) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (int r = 0; r < variables_; ++r) v *= ipow(u[r], t.powers[r]);
    sum += v;
  }
  return sum;
}

void Polynomial::gradient(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.begin() + variables_, 0.0);
  for (const auto& t : terms_) {
    for (int r = 0; r < variables_; ++r) {
      const int pr = t.powers[r];
      if (pr == 0) continue;
      double v = t.coefficient * pr * ipow(u[r], pr - 1);
      for (int s = 0; s < variables_; ++s) {
        if (s != r) v *= ipow(u[s], t.powers[s]);
      }
      out[r] += v;
    }
  }
}

void Polynomial::hessian(std::span<const double> u, std::span<double> out) const {
  const int n = variables_;
  std::fill(out.begin(), out.begin() + n * n, 0.0);
  for (const auto& t : terms_) {
    for (int r = 0; r < n; ++r) {
      for (int s = r; s < n; ++s) {
        double v = t.coefficient;
        if (r == s) {
          const int p = t.powers[r];
          if (p < 2) continue;
          v *= p * (p - 1) * ipow(u[r], p - 2);
        } else {
          const int pr = t.powers[r];
          const int ps = t.powers[s];
          if (pr == 0 || ps == 0) continue;
          v *= pr * ps * ipow(u[r], pr - 1) * ipow(u[s], ps - 1);
        }
        for (int q = 0; q < n; ++q) {
          if (q != r && q != s) v *= ipow(u[q], t.powers[q]);
        }
        out[r * n + s] += v;
        if (r != s) out[s * n + r] += v;
      }
    }
  }
}

bool Polynomial::bounded_below() const {
  if (terms_.empty()) return true;
  const int deg = degree();
  if (deg == 0) return true;
  if (deg % 2 != 0) return false;
  auto leading = [&](std::span<const double> dir) {
    double sum = 0.0;
    for (const auto& t : terms_) {
      if (total_degree(t) != deg) continue;
      double v = t.coefficient;
      for (int r = 0; r < variables_; ++r) v *= ipow(dir[r], t.powers[r]);
      sum += v;
    }
    return sum;
  };
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  std::vector<double> dir(static_cast<std::size_t>(variables_));
  const int samples = variables_ == 1 ? 2 : 512;
  for (int i = 0; i < samples; ++i) {
    if (variables_ == 1) {
      dir[0] = i == 0 ? 1.0 : -1.0;
    } else {
      double norm = 0.0;
      for (auto& x : dir) {
        x = normal(rng);
        norm += x * x;
      }
      for (auto& x : dir) x /= std::sqrt(norm);
    }
    const double lead = leading(dir);
    if (deg == 2 ? lead < 0.0 : lead <= 0.0) return false;
  }
  return true;
}

}  // namespace wavedim
