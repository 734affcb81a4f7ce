#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>

#include <Eigen/Core>

#include "wavedim/spectral.hpp"

namespace wavedim {

/// Pseudo-spectral bridge between sine-mode coefficients and values on the
/// interior collocation grid x_i = i * l / (K + 1), i = 1..K, per axis.
///
/// Basis functions are prod_a sqrt(2/l_a) sin(m_a pi x_a / l_a), orthonormal in L2.
/// With this normalization the trapezoid rule on the grid is an exact projection
/// for every mode whose indices do not exceed the grid size, so `analyze` inverts
/// `synthesize` and Parseval holds to round-off.
///
/// Transforms are DST-I (FFTW RODFT00). Instances own their plans and buffers and
/// must not be shared between threads; separate instances may run concurrently.
class Collocation {
 public:
  Collocation(const Domain& domain, const Spectrum& spectrum, std::array<int, 3> points_per_axis);
  ~Collocation();
  Collocation(Collocation&&) noexcept;
  Collocation& operator=(Collocation&&) noexcept;
  Collocation(const Collocation&) = delete;
  Collocation& operator=(const Collocation&) = delete;

  /// Smallest grid avoiding aliasing of products of degree `product_degree`
  /// (at least quadratic, i.e. the 3/2 rule) onto the retained modes.
  static std::array<int, 3> dealiased_points(const Spectrum& spectrum, int dim, int product_degree);

  int dim() const { return dim_; }
  std::size_t modes() const { return modes_; }
  std::size_t points() const { return points_; }
  std::array<int, 3> points_per_axis() const { return per_axis_; }
  /// Trapezoid weight of one interior node.
  double cell_volume() const { return cell_volume_; }
  /// Total weight carried by boundary nodes, |Omega| - points * cell_volume.
  double boundary_weight() const { return boundary_weight_; }
  /// Coordinate of grid point p along `axis`.
  double coordinate(std::size_t p, int axis) const;

  /// coeffs: modes x columns  ->  grid: points x columns.
  void synthesize(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, Eigen::MatrixXd& grid);
  /// grid: points x columns  ->  coeffs: modes x columns.
  void analyze(const Eigen::Ref<const Eigen::MatrixXd>& grid, Eigen::MatrixXd& coeffs);

 private:
  struct Batch;
  Batch& batch(Eigen::Index columns);

  int dim_ = 1;
  std::size_t modes_ = 0;
  std::size_t points_ = 0;
  std::array<int, 3> per_axis_{1, 1, 1};
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  double cell_volume_ = 0.0;
  double boundary_weight_ = 0.0;
  double synth_scale_ = 1.0;
  double analyze_scale_ = 1.0;
  std::vector<std::size_t> offsets_;  ///< buffer offset of each mode
  std::map<Eigen::Index, std::unique_ptr<Batch>> batches_;
};

}  // namespace wavedim
