#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wavedim/collocation.hpp"
#include "wavedim/polynomial.hpp"
#include "wavedim/spectral.hpp"

namespace wavedim {

/// f(u) = grad F0(u) + rotational term, plus the forcing g.
///
/// The rotational term is gamma * b * (sin(u2/gamma), -sin(u1/gamma)); its Jacobian at
/// u = 0 is b * ((0, 1), (-1, 0)) with eigenvalues +-ib.
struct NonlinearitySpec {
  Polynomial potential;          ///< F0; empty means no gradient part
  bool rotational = false;       ///< requires two components
  double gamma = 0.1;            ///< damping
  double rotation_strength = 1;  ///< b
  Eigen::MatrixXd forcing;       ///< g as M x N coefficients; empty means zero
};

/// (u, du/dt) in sine-mode coefficients, each M x N.
struct GalerkinState {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  double time = 0.0;
};

/// Per-mode exact exponential of a 2x2 linear block, for a full step h and a half step.
class ModePropagator {
 public:
  ModePropagator() = default;
  /// generators[k] = row-major (a11, a12, a21, a22) acting on (row k, row M+k).
  ModePropagator(const std::vector<std::array<double, 4>>& generators, double h);

  /// The damped-wave block ((0, 1), (-lambda, -gamma)) for every mode.
  static ModePropagator wave(const std::vector<double>& lambdas, double gamma, double h);

  /// exp(A t) of a single 2x2 block.
  static std::array<double, 4> exponential(const std::array<double, 4>& a, double t);

  double step() const { return h_; }
  std::size_t modes() const { return full_.size(); }
  void apply(Eigen::Ref<Eigen::MatrixXd> x, bool half) const;

 private:
  double h_ = 0.0;
  std::vector<std::array<double, 4>> full_;
  std::vector<std::array<double, 4>> half_;
};

/// Lawson (integrating-factor) RK4 over a 2M x C matrix whose column ranges may carry
/// different linear propagators. The nonlinear part is given as a callback.
class ExponentialRk4 {
 public:
  using Rhs = std::function<void(const Eigen::MatrixXd& x, Eigen::MatrixXd& out)>;

  struct Block {
    Eigen::Index first = 0;
    Eigen::Index count = 0;
    ModePropagator propagator;
  };

  explicit ExponentialRk4(std::vector<Block> blocks);

  double step_size() const;
  /// Advances x by one step; a null rhs advances the linear part only.
  void step(Eigen::MatrixXd& x, const Rhs& rhs);

 private:
  void propagate(Eigen::MatrixXd& x, bool half) const;

  std::vector<Block> blocks_;
  Eigen::MatrixXd k1_, k2_, k3_, k4_, stage_, base_;
};

/// Spectral Galerkin truncation of u_tt + gamma u_t - Laplace u + f(u) = g on a box.
class GalerkinModel {
 public:
  GalerkinModel(const Domain& domain, std::size_t modes, int components, NonlinearitySpec spec);

  const Domain& domain() const { return domain_; }
  const Spectrum& spectrum() const { return spectrum_; }
  const NonlinearitySpec& spec() const { return spec_; }
  std::size_t modes() const { return spectrum_.modes(); }
  int components() const { return spectrum_.components; }
  double gamma() const { return spec_.gamma; }
  bool has_nonlinearity() const { return !spec_.potential.empty() || spec_.rotational; }
  bool has_forcing() const { return spec_.forcing.size() > 0; }
  Collocation& collocation() { return *grid_; }

  GalerkinState zero_state() const;
  /// Seeded random state with coefficients decaying like 1/lambda (u) and 1/sqrt(lambda) (v).
  GalerkinState random_state(std::uint64_t seed, double amplitude) const;

  /// Pointwise f on grid values: ugrid and out are P x N.
  void pointwise_force(const Eigen::MatrixXd& ugrid, Eigen::MatrixXd& out) const;
  /// Pointwise Jacobian: out is P x N^2 with column r*N + s holding df_r/du_s.
  void pointwise_jacobian(const Eigen::MatrixXd& ugrid, Eigen::MatrixXd& out) const;
  /// df/du at u = 0, row-major N x N.
  std::vector<double> jacobian_at_zero() const;

  /// Coefficients of f(u), M x N. Zero when there is no nonlinearity.
  void eval_nonlinearity(const Eigen::MatrixXd& u, Eigen::MatrixXd& out);
  /// Galerkin matrix of the linearization at u, MN x MN, in the column-major layout of
  /// the M x N coefficient matrix: entry (r*M + j, s*M + k) = (df_r/du_s e_k, e_j).
  Eigen::MatrixXd galerkin_jacobian(const Eigen::MatrixXd& u);

  /// Nonlinear part of the right-hand side for x = [u; v] (2M x N): [0; g - f(u)].
  void nonlinear_rhs(const Eigen::MatrixXd& x, Eigen::MatrixXd& out);

  /// Integral of F0(u) over the domain; the boundary carries F0(0).
  double potential_integral(const Eigen::MatrixXd& u);
  /// max over the closed domain of |u(x)| (Euclidean in components), on the grid.
  double u_linf(const Eigen::MatrixXd& u);

  double energy_norm_sq(const GalerkinState& s) const;
  /// Dissipativity functional with shift gamma/2.
  double psi(const GalerkinState& s);
  /// Global Lyapunov function of the gradient case; throws when the rotational term is on.
  double lyapunov_functional(const GalerkinState& s);

  /// Largest admissible step, 0.5 / sqrt(lambda_M).
  double max_step() const;
  /// One integrator step of size dt; checks resolution and blow-up.
  void step(GalerkinState& s, double dt);

 private:
  Domain domain_;
  Spectrum spectrum_;
  NonlinearitySpec spec_;
  std::unique_ptr<Collocation> grid_;
  Eigen::MatrixXd ugrid_, fgrid_, tmp_;
  std::unique_ptr<ExponentialRk4> stepper_;
  double stepper_h_ = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  double energy = 0.0;  ///< ||xi||_E
  double psi = 0.0;
  double lyapunov = 0.0;  ///< NaN when the rotational term is on
  double u_linf = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<GalerkinState> states;  ///< filled only when requested
  GalerkinState final_state;
};

/// Integrates from `initial` for `duration` with steps no larger than dt, recording every
/// `stride` steps and at the end.
Trajectory simulate(GalerkinModel& model, const GalerkinState& initial, double duration, double dt,
                    std::size_t stride, bool keep_states = false);

/// Advances without recording.
GalerkinState advance(GalerkinModel& model, const GalerkinState& initial, double duration, double dt);

/// Size of f'(u) over trajectory samples: for d = 1 the max of sup_x |f'|, for d = 2 the
/// time average of sup_x |f'|, otherwise the max of the L_d norm. |.| is Frobenius.
double estimate_Bd(GalerkinModel& model, const std::vector<GalerkinState>& samples, int d);

}  // namespace wavedim
