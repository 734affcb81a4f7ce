#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wavedim/dynamics.hpp"

namespace wavedim {

/// Largest admissible shift, min(gamma/4, lambda_1/(2 gamma)).
double epsilon_max(double gamma, double lambda1);
/// gamma/4 capped at epsilon_max.
double default_epsilon(double gamma, double lambda1);

/// Linear block of one mode in the variables (sqrt(lambda) phi, phi_t + eps phi), in which
/// the energy inner product is Euclidean. Row-major.
std::array<double, 4> shifted_block(double lambda, double gamma, double eps);

/// Base trajectory plus k tangent vectors of the equation of variations.
///
/// A tangent is a vector of length 2MN: for each component r, M entries of sqrt(lambda) phi
/// followed by M entries of psi = phi_t + eps phi. In these coordinates the energy inner
/// product is the Euclidean one.
class VariationalBundle {
 public:
  VariationalBundle(GalerkinModel& model, const GalerkinState& base, const Eigen::MatrixXd& tangents, double epsilon);

  std::size_t count() const { return count_; }
  std::size_t dimension() const { return 2 * model_->modes() * static_cast<std::size_t>(model_->components()); }
  double epsilon() const { return epsilon_; }
  double time() const { return time_; }
  GalerkinState base() const;
  /// 2MN x k view of the tangent vectors.
  Eigen::Map<Eigen::MatrixXd> tangents();

  /// Time derivative of every tangent at the current base state; out is 2MN x k.
  void variational_rhs(Eigen::MatrixXd& out);
  /// Advances base and tangents together by one step of size dt.
  void step(double dt);
  /// Householder QR of the tangents; replaces them by Q (positive diagonal) and returns
  /// log |R_ii|.
  std::vector<double> orthonormalize();

 private:
  void rhs(const Eigen::MatrixXd& x, Eigen::MatrixXd& out);
  void make_stepper(double dt);

  GalerkinModel* model_;
  double epsilon_;
  std::size_t count_;
  double time_;
  Eigen::MatrixXd state_;  ///< 2M x (N + N k): base columns then tangent columns
  Eigen::VectorXd inv_sqrt_lambda_;
  std::unique_ptr<ExponentialRk4> stepper_;
  double stepper_h_ = 0.0;
  Eigen::MatrixXd ugrid_, fgrid_, jac_, phi_, phigrid_, wgrid_, coeffs_;
};

/// Full generator of the equation of variations at u, 2MN x 2MN, in tangent coordinates.
Eigen::MatrixXd generator_matrix(GalerkinModel& model, const Eigen::MatrixXd& u, double epsilon);

/// Sums of the n largest eigenvalues of the symmetric part of `generator`, n = 1..count.
std::vector<double> n_traces(const Eigen::MatrixXd& generator, std::size_t count);

/// Exact Lyapunov exponents of the stationary solution u: real parts of the eigenvalues of
/// the linearization, sorted descending, 2MN values.
std::vector<double> equilibrium_exponents(GalerkinModel& model, const Eigen::MatrixXd& u);

/// Kaplan-Yorke dimension of exponents sorted descending. Returns the exponent count when
/// every partial sum is non-negative.
double ky_dimension(std::span<const double> exponents);

struct LyapunovOptions {
  std::size_t tangents = 0;  ///< 0 means all 2MN
  double duration = 100.0;   ///< averaging window
  double dt = 0.0;           ///< 0 means the model's largest admissible step
  double qr_interval = 0.5;
  double epsilon = -1.0;     ///< negative means default_epsilon
  std::size_t q_every = 0;   ///< sample q(n) every this many QR intervals; 0 disables
  std::uint64_t seed = 1;
};

struct LyapunovReport {
  std::vector<double> exponents;   ///< descending
  std::vector<double> cumulative;  ///< partial sums
  double ky_dimension = 0.0;
  bool truncated = false;  ///< fewer than 2MN tangents and every partial sum non-negative
  bool converged = true;
  double drift = 0.0;  ///< largest half-window disagreement relative to the tolerance scale
  std::vector<double> q_samples;  ///< time-averaged n-traces, n = 1..k
  std::size_t q_sample_count = 0;
  double epsilon = 0.0;
  double duration = 0.0;
  std::size_t dimension = 0;  ///< 2MN
  GalerkinState final_state;
};

/// gamma + sup_x |f'(u)| / sqrt(lambda_1); compute_exponents needs qr_interval times this <= 1 at
/// the initial state.
double growth_rate_estimate(GalerkinModel& model, const Eigen::MatrixXd& u);

/// Discrete QR method along the trajectory started at `initial`.
LyapunovReport compute_exponents(GalerkinModel& model, const GalerkinState& initial, const LyapunovOptions& options);

/// Time average over [0, duration] of the n-traces, n = 1..n_max, sampled every
/// `sample_interval` along the trajectory from `initial`. dt <= 0 selects the largest stable step.
std::vector<double> q_of_n(GalerkinModel& model, const GalerkinState& initial, std::size_t n_max, double duration,
                           double dt, double sample_interval, double epsilon);

}  // namespace wavedim
