#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavedim/bounds.hpp"
#include "wavedim/fit.hpp"
#include "wavedim/spectral.hpp"

namespace wavedim {

enum class FamilyMode { Orthonormal, Contracted, Projected };

/// n functions in H^1_0(Omega)^N, stored as sine coefficients over the first M scalar modes.
/// Column i of `coeffs` is phi_i: rows r*M .. r*M + M - 1 hold component r.
struct SuborthFamily {
  Domain domain = Domain::interval(1.0);
  Spectrum spectrum;  ///< M scalar modes, N components
  Eigen::MatrixXd coeffs;  ///< MN x n
  Eigen::MatrixXd gram;    ///< n x n gradient Gram matrix (grad phi_i, grad phi_j)

  int dim() const { return domain.dim(); }
  int components() const { return spectrum.components; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs.cols()); }
  /// Largest eigenvalue of the gradient Gram matrix (0 for an empty family).
  double gram_norm() const;
  bool suborthonormal(double tol = 1e-10) const;
};

/// Gradient Gram matrix of a coefficient matrix.
Eigen::MatrixXd gradient_gram(const Spectrum& spectrum, const Eigen::MatrixXd& coeffs);

/// Seeded random family. `contraction` > 0 fixes the contraction factor; otherwise each
/// function gets its own factor in (0, 1]. Throws NumericFailure on a near-zero pivot.
SuborthFamily gen_suborth(const Domain& domain, int components, std::size_t n, std::size_t modes, std::uint64_t seed,
                          FamilyMode mode, double contraction = 0.0);

/// Family phi_j = e_j / sqrt(lambda_j) over the first n scalar modes, one component.
SuborthFamily eigenfunction_family(const Domain& domain, std::size_t n);

/// Scalar family formed by component r of every function.
SuborthFamily component_family(const SuborthFamily& family, int r);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// sum_i (K phi_i, phi_i) against sum_{i<=n} mu_i for K = diag(mu), mu descending and
/// phi_i the columns of `family` (Euclidean ambient space).
LemmaCheck verify_sub_lemma(std::span<const double> mu, const Eigen::MatrixXd& family);

/// rho(x) = sum_j |phi_j(x)|^2 sampled on the interior grid (rho vanishes on the boundary).
struct RhoField {
  std::vector<double> values;
  std::array<int, 3> points{1, 1, 1};
  double linf = 0.0;
  double l1 = 0.0;
  double lp = 0.0;  ///< L_{d/(d-2)} for d >= 3, otherwise 0
};

/// Evaluates rho with `points_per_axis` interior points on each axis.
RhoField evaluate_rho(const SuborthFamily& family, int points_per_axis);

/// sum_j ||phi_j||^2, exact in coefficients.
double rho_l1_exact(const SuborthFamily& family);

struct RhoCheck {
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// ||rho||_inf against N l / 4 with relative tolerance grid_tol (defaults 1024 cells, 2 %).
RhoCheck rho_bound_d1(const SuborthFamily& family, int cells = 1024, double grid_tol = 0.02);
/// ||rho||_{L1} against N |Omega| ln(e n) / (2 pi), evaluated exactly in coefficients.
RhoCheck rho_bound_d2(const SuborthFamily& family);
/// ||rho||_{L3} against (N L_{0,3})^{2/3} 3 n^{1/3} with 5 % quadrature tolerance.
RhoCheck rho_bound_d3(const SuborthFamily& family, const ClrConstants& clr, int points_per_axis = 48);
double rho_bound_d3_value(int components, std::size_t n, const ClrConstants& clr);

/// ||rho||_{L3} of eigenfunction families on a 3-box for each n, with a log-log fit.
struct RhoScaling {
  std::vector<std::size_t> sizes;
  std::vector<double> norms;
  ScalingFit fit;
};
RhoScaling rho_scaling_d3(const Domain& box, std::span<const std::size_t> sizes, int points_per_axis = 48);

struct InvSqrtCheck {
  double sum = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// sum_{j<=n} bold lambda_j^{-1/2} against (N l / pi) ln(e n) (d = 1) or
/// (N |Omega| / (2 pi))^{1/2} 2 sqrt(n) (d = 2).
InvSqrtCheck sum_inv_sqrt(const Domain& domain, const Spectrum& spectrum, std::size_t n);

struct EmbeddingCheck {
  double hat_ratio = 0.0;
  double sine_ratio = 0.0;
  double max_random_ratio = 0.0;
  double bound = 0.0;  ///< l / 4
  bool pass = false;
};

/// ||u||_inf^2 / ||u'||^2 on a uniform grid with `cells` cells: the hat function, sin(pi x / l)
/// and `samples` seeded random sine series.
EmbeddingCheck sharp_embedding_check(double length, int cells = 1024, std::size_t samples = 100,
                                     std::uint64_t seed = 1, double grid_tol = 0.02);

enum class CampaignKind { SubLemma, RhoD1, RhoD2, RhoD3, InvSqrt };

CampaignKind parse_campaign_kind(const std::string& name);
std::string campaign_name(CampaignKind kind);

struct CampaignRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct CampaignOptions {
  CampaignKind kind = CampaignKind::SubLemma;
  std::size_t families = 1000;
  std::size_t n_max = 64;
  std::uint64_t seed = 1;
  int grid = 0;  ///< points per axis; 0 selects 1024 (d = 1), 256 (d = 2), 32 (d = 3)
  unsigned threads = 1;
};

struct CampaignSummary {
  std::string kind;
  std::size_t families = 0;
  std::size_t passed = 0;
  double min_margin = 0.0;
  double max_ratio = 0.0;  ///< largest lhs / rhs
  std::vector<CampaignRow> rows;
};

/// Randomized verification over seeded families mixing orthonormal, contracted and
/// projected generators 70/20/10. Family i uses seed options.seed + i.
CampaignSummary run_campaign(const CampaignOptions& options);

}  // namespace wavedim
