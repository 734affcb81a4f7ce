#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace wavedim {

enum class DomainKind { Interval, Rectangle, Box };

/// Axis-aligned box (0, l_1) x ... x (0, l_d) carrying Dirichlet conditions.
class Domain {
 public:
  static Domain interval(double length);
  static Domain rectangle(double lx, double ly);
  /// Any dimension from 1 to 3; one side length per axis.
  static Domain box(std::vector<double> lengths);

  DomainKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lengths_.size()); }
  std::span<const double> lengths() const { return lengths_; }
  double length(int axis) const { return lengths_.at(static_cast<std::size_t>(axis)); }
  double measure() const;

  bool operator==(const Domain&) const = default;

 private:
  Domain(DomainKind kind, std::vector<double> lengths);

  DomainKind kind_ = DomainKind::Interval;
  std::vector<double> lengths_;
};

/// Multi-index of a Dirichlet sine mode; unused axes hold 0.
using ModeIndex = std::array<int, 3>;

/// Sorted Dirichlet Laplacian eigenvalues of a box, with N-fold vector copies.
struct Spectrum {
  std::vector<double> lambdas;       ///< non-decreasing, size M
  std::vector<ModeIndex> indices;    ///< sine multi-index of each scalar mode
  int components = 1;                ///< N
  std::vector<double> bold_lambdas;  ///< bold_lambdas[k*N + r] == lambdas[k]

  std::size_t modes() const { return lambdas.size(); }
  std::size_t vector_modes() const { return bold_lambdas.size(); }
  double first() const { return lambdas.front(); }
  double last() const { return lambdas.back(); }
};

/// First `modes` Dirichlet eigenvalues of `domain`, ties ordered lexicographically
/// by sine index. Throws InvalidInput on modes == 0 or components < 1.
Spectrum build_spectrum(const Domain& domain, std::size_t modes, int components = 1);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// Weyl principal term ((2pi)^d / (omega_d |Omega|))^{2/d} n^{2/d}.
double weyl_estimate(const Domain& domain, std::size_t n);

struct LiYauBound {
  double cumulative;  ///< lower bound for sum_{j<=n} bold lambda_j
  double per_index;   ///< lower bound for bold lambda_n
};

/// Li-Yau lower bounds 2pi/(N|Omega|) n^2 and 2pi/(N|Omega|) n. Planar domains only.
LiYauBound li_yau_lower(const Domain& domain, std::size_t n, int components = 1);

}  // namespace wavedim
