#include "wavedim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavedim/error.hpp"

namespace wavedim {

ClrConstants clr_constants(int d, std::optional<double> value) {
  if (d < 3) throw InvalidInput("CLR constants are used only for d >= 3");
  ClrConstants c;
  c.d = d;
  c.classical = unit_ball_volume(d) / std::pow(2.0 * std::numbers::pi, d);
  if (value) {
    c.value = *value;
  } else if (d == 3) {
    c.value = 0.116;
  } else {
    throw InvalidInput("no default CLR constant for d = " + std::to_string(d) + "; supply one");
  }
  if (c.value < c.classical) {
    throw InvalidInput("CLR constant " + std::to_string(c.value) + " is below the semiclassical value " +
                       std::to_string(c.classical));
  }
  return c;
}

double clr_prefactor(const ClrConstants& clr) {
  const double d = clr.d;
  return std::pow(8.0, d) * std::pow(d / (d - 2.0), d / 2.0) * clr.value;
}

double upper_bound_d3plus(double gamma, int components, int d, double bd, const ClrConstants& clr) {
  if (d < 3) throw InvalidInput("upper_bound_d3plus needs d >= 3");
  if (clr.d != d) throw InvalidInput("CLR constant dimension does not match d");
  if (!(gamma > 0.0) || bd < 0.0 || components < 1) throw InvalidInput("need gamma > 0, B_d >= 0, N >= 1");
  return components * clr_prefactor(clr) * std::pow(gamma, -d) * std::pow(bd, d);
}

double d1_root(double coefficient) {
  if (!(coefficient > 0.0)) throw InvalidInput("root coefficient A must be positive");
  const double a = coefficient;
  auto g = [a](double n) { return n - a * (1.0 + std::log(n)); };
  double lo = std::max(1.0, a);
  double hi = std::max(std::numbers::e, 4.0 * a * std::log(a + std::numbers::e));
  if (g(lo) >= 0.0) return lo;
  if (g(hi) < 0.0) throw NumericFailure("root bracket failed for A = " + std::to_string(a));
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BoundReport upper_bound_d1(double gamma, int components, double length, double b1) {
  if (!(gamma > 0.0) || !(length > 0.0) || !(b1 > 0.0) || components < 1) {
    throw InvalidInput("d = 1 bound needs gamma, length, B_1 > 0 and N >= 1");
  }
  BoundReport r;
  r.gamma = gamma;
  r.components = components;
  r.d = 1;
  r.size = length;
  r.bd = b1;
  r.formula = "d1_root";
  r.coefficient = components * (8.0 / std::numbers::pi) * length * b1 / gamma;
  r.root = d1_root(r.coefficient);
  r.majorant = r.coefficient >= std::numbers::e ? 2.0 * r.coefficient * std::log(r.coefficient) : r.root;
  r.upper = r.root;
  return r;
}

double upper_bound_d2(double gamma, int components, double measure, double b2) {
  if (!(gamma > 0.0) || !(measure > 0.0) || b2 < 0.0 || components < 1) {
    throw InvalidInput("d = 2 bound needs gamma, |Omega| > 0, B_2 >= 0, N >= 1");
  }
  return components * (128.0 / std::numbers::pi) * measure * b2 * b2 / (gamma * gamma);
}

double upper_bound_d1_simple(double gamma, int components, double length, double b1) {
  if (!(gamma > 0.0) || !(length > 0.0) || b1 < 0.0 || components < 1) {
    throw InvalidInput("elementary d = 1 bound needs gamma, length > 0, B_1 >= 0, N >= 1");
  }
  return components * 16.0 * length * b1 * b1 / (gamma * gamma);
}

std::complex<double> growth_root(double gamma, double lambda, double a, double b) {
  const std::complex<double> w(gamma * gamma / 4.0 - lambda - a, -b);
  return -gamma / 2.0 + std::sqrt(w);
}

UnstableModes unstable_mode_count(double gamma, double a, double b, const Spectrum& spectrum) {
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be positive");
  UnstableModes out;
  for (std::size_t i = 0; i < spectrum.modes(); ++i) {
    const double shift = gamma * gamma * (spectrum.lambdas[i] + a);
    const double lhs = b * b;
    const double scale = std::max(std::abs(lhs), std::abs(shift));
    const bool unstable = lhs - shift > 1e-12 * scale;
    if (unstable) {
      ++out.count;
      out.indices.push_back(i);
      out.growth.push_back(growth_root(gamma, spectrum.lambdas[i], a, b).real());
    }
  }
  out.instability_index = b != 0.0 ? 2 * out.count : out.count;
  out.complete = spectrum.modes() == 0 || out.indices.empty() || out.indices.back() + 1 < spectrum.modes();
  return out;
}

LowerBoundScaling lower_bound_scaling(std::span<const double> gammas, double a, double b, const Domain& domain) {
  if (gammas.size() < 4) throw NumericFailure("degenerate fit: need at least four gamma values");
  const auto [lo, hi] = std::minmax_element(gammas.begin(), gammas.end());
  if (!(*lo > 0.0)) throw InvalidInput("gamma values must be positive");
  if (*hi / *lo < 8.0 * (1.0 - 1e-12)) throw NumericFailure("degenerate fit: gamma values must span a factor of 8");
  LowerBoundScaling out;
  std::vector<double> counts;
  for (double g : gammas) {
    std::size_t modes = 64;
    UnstableModes u;
    for (;;) {
      u = unstable_mode_count(g, a, b, build_spectrum(domain, modes));
      if (u.complete) break;
      if (modes > (std::size_t{1} << 22)) throw NumericFailure("unstable band exceeds the enumeration limit");
      modes *= 2;
    }
    if (u.count == 0) throw NumericFailure("degenerate fit: no unstable modes at gamma = " + std::to_string(g));
    out.gammas.push_back(g);
    out.counts.push_back(u.count);
    counts.push_back(static_cast<double>(u.count));
  }
  out.fit = fit_scaling(out.gammas, counts);
  return out;
}

std::vector<EquilibriumRoots> equilibrium_spectrum(double gamma, std::span<const double> nus) {
  std::vector<EquilibriumRoots> out;
  out.reserve(nus.size());
  for (double nu : nus) {
    const std::complex<double> root = std::sqrt(std::complex<double>(gamma * gamma - 4.0 * nu, 0.0));
    out.push_back({(-gamma - root) / 2.0, (-gamma + root) / 2.0});
  }
  return out;
}

std::size_t morse_index(std::span<const double> nus) {
  return static_cast<std::size_t>(std::count_if(nus.begin(), nus.end(), [](double nu) { return nu < 0.0; }));
}

std::size_t equilibrium_instability_index(double gamma, std::span<const double> nus) {
  std::size_t n = 0;
  for (const auto& r : equilibrium_spectrum(gamma, nus)) {
    n += r.first.real() > 0.0;
    n += r.second.real() > 0.0;
  }
  return n;
}

double harmonic_interpolated(double n) {
  if (n <= 0.0) return 0.0;
  const double whole = std::floor(n);
  double h = 0.0;
  for (double j = 1.0; j <= whole; j += 1.0) h += 1.0 / j;
  return h + (n - whole) / (whole + 1.0);
}

double equilibrium_lyapunov_dim(double gamma, double b, double length) {
  if (!(gamma > 0.0) || !(b > 0.0) || !(length > 0.0)) throw InvalidInput("need gamma, b, length > 0");
  const double c = b * length / std::numbers::pi;
  double h = 0.0;
  double prev = 0.0;  // value at n - 1
  for (std::size_t n = 1;; ++n) {
    h += 1.0 / static_cast<double>(n);
    const double value = c * h - gamma * static_cast<double>(n);
    if (value < 0.0) {
      const double base = static_cast<double>(n - 1);
      return base + prev / (prev - value);
    }
    prev = value;
    if (n > (std::size_t{1} << 32)) throw NumericFailure("equilibrium dimension root not bracketed");
  }
}

}  // namespace wavedim
