#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavedim/fit.hpp"
#include "wavedim/spectral.hpp"

namespace wavedim {

/// CLR constant L_{0,d} together with its semiclassical value omega_d / (2 pi)^d.
struct ClrConstants {
  int d = 3;
  double value = 0.116;
  double classical = 0.0;
};

/// d = 3 defaults to 0.116; other dimensions require an explicit value.
ClrConstants clr_constants(int d, std::optional<double> value = std::nullopt);

/// 8^d (d/(d-2))^{d/2} L_{0,d}.
double clr_prefactor(const ClrConstants& clr);

struct BoundReport {
  double upper = 0.0;
  double gamma = 0.0;
  int components = 1;
  int d = 1;
  double size = 0.0;  ///< length for d = 1, measure otherwise
  double bd = 0.0;
  std::string formula;
  double root = 0.0;      ///< d = 1 only: n*
  double majorant = 0.0;  ///< d = 1 only: 2 A ln A
  double coefficient = 0.0;  ///< d = 1 only: A
};

/// N c_d gamma^-d B_d^d, d >= 3.
double upper_bound_d3plus(double gamma, int components, int d, double bd, const ClrConstants& clr);

/// Root of n = A ln(e n) by bisection on [max(1, A), max(e, 4 A ln(A + e))].
double d1_root(double coefficient);

/// A = N (8/pi) gamma^-1 l B_1, root n* of n = A ln(e n), majorant 2 A ln A (n* when A < e).
BoundReport upper_bound_d1(double gamma, int components, double length, double b1);

/// N (128/pi) gamma^-2 |Omega| B_2^2.
double upper_bound_d2(double gamma, int components, double measure, double b2);

/// N (16/gamma^2) l B_1^2.
double upper_bound_d1_simple(double gamma, int components, double length, double b1);

struct UnstableModes {
  std::size_t count = 0;               ///< unstable scalar modes
  std::vector<std::size_t> indices;    ///< zero-based spectrum positions
  std::vector<double> growth;          ///< Re mu_+ of each unstable mode
  std::size_t instability_index = 0;   ///< 2 count for b != 0, count for b = 0
  bool complete = true;                ///< false when the last spectrum mode is still unstable
};

/// Modes whose root mu_+ of mu^2 + gamma mu + lambda + a + ib = 0 has positive real part.
/// Marginal modes (b^2 equal to gamma^2 (lambda + a) to 1e-12 relative) count as stable.
UnstableModes unstable_mode_count(double gamma, double a, double b, const Spectrum& spectrum);

/// Root mu_+ = -gamma/2 + sqrt(gamma^2/4 - lambda - a - ib).
std::complex<double> growth_root(double gamma, double lambda, double a, double b);

struct LowerBoundScaling {
  std::vector<double> gammas;
  std::vector<std::size_t> counts;
  ScalingFit fit;
};

/// Unstable-mode counts over gamma and the slope of log(count) against log(1/gamma).
/// Needs four or more gamma values spanning a factor of at least 8 and no zero count.
LowerBoundScaling lower_bound_scaling(std::span<const double> gammas, double a, double b, const Domain& domain);

struct EquilibriumRoots {
  std::complex<double> first;   ///< (-gamma - sqrt(gamma^2 - 4 nu)) / 2
  std::complex<double> second;  ///< (-gamma + sqrt(gamma^2 - 4 nu)) / 2
};

/// Roots of mu^2 + gamma mu + nu = 0 for each nu.
std::vector<EquilibriumRoots> equilibrium_spectrum(double gamma, std::span<const double> nus);

/// Number of negative nu.
std::size_t morse_index(std::span<const double> nus);

/// Number of roots with positive real part.
std::size_t equilibrium_instability_index(double gamma, std::span<const double> nus);

/// Harmonic sum H(n), linear between integers, H(0) = 0.
double harmonic_interpolated(double n);

/// Largest n with (b l / pi) H(n) - gamma n >= 0, H interpolated linearly.
double equilibrium_lyapunov_dim(double gamma, double b, double length);

}  // namespace wavedim
