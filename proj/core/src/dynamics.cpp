#include "wavedim/dynamics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wavedim/error.hpp"

namespace wavedim {

ModePropagator::ModePropagator(const std::vector<std::array<double, 4>>& generators, double h) : h_(h) {
  full_.reserve(generators.size());
  half_.reserve(generators.size());
  for (const auto& a : generators) {
    full_.push_back(exponential(a, h));
    half_.push_back(exponential(a, 0.5 * h));
  }
}

ModePropagator ModePropagator::wave(const std::vector<double>& lambdas, double gamma, double h) {
  std::vector<std::array<double, 4>> gens;
  gens.reserve(lambdas.size());
  for (double lam : lambdas) gens.push_back({0.0, 1.0, -lam, -gamma});
  return ModePropagator(gens, h);
}

std::array<double, 4> ModePropagator::exponential(const std::array<double, 4>& a, double t) {
  const double tau = a[0] + a[3];
  const double det = a[0] * a[3] - a[1] * a[2];
  const double disc = 0.25 * tau * tau - det;
  double c = 0.0;
  double s = 0.0;
  const double z = disc * t * t;
  if (std::abs(z) < 1e-6) {
    c = 1.0 + z / 2.0 + z * z / 24.0;
    s = t * (1.0 + z / 6.0 + z * z / 120.0);
  } else if (disc > 0.0) {
    const double w = std::sqrt(disc);
    c = std::cosh(w * t);
    s = std::sinh(w * t) / w;
  } else {
    const double w = std::sqrt(-disc);
    c = std::cos(w * t);
    s = std::sin(w * t) / w;
  }
  const double scale = std::exp(0.5 * tau * t);
  const double half_tau = 0.5 * tau;
  return {scale * (c + s * (a[0] - half_tau)), scale * s * a[1], scale * s * a[2],
          scale * (c + s * (a[3] - half_tau))};
}

void ModePropagator::apply(Eigen::Ref<Eigen::MatrixXd> x, bool half) const {
  const auto& e = half ? half_ : full_;
  const Eigen::Index m = static_cast<Eigen::Index>(e.size());
  if (x.rows() != 2 * m) throw InvalidInput("propagator applied to a state of the wrong size");
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double* col = x.col(c).data();
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& q = e[static_cast<std::size_t>(k)];
      const double u = col[k];
      const double v = col[m + k];
      col[k] = q[0] * u + q[1] * v;
      col[m + k] = q[2] * u + q[3] * v;
    }
  }
}

ExponentialRk4::ExponentialRk4(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidInput("integrator needs at least one propagator block");
}

double ExponentialRk4::step_size() const { return blocks_.front().propagator.step(); }

void ExponentialRk4::propagate(Eigen::MatrixXd& x, bool half) const {
  for (const Block& b : blocks_) b.propagator.apply(x.middleCols(b.first, b.count), half);
}

void ExponentialRk4::step(Eigen::MatrixXd& x, const Rhs& rhs) {
  if (!rhs) {
    propagate(x, false);
    return;
  }
  const double h = step_size();
  rhs(x, k1_);

  stage_ = x + 0.5 * h * k1_;
  propagate(stage_, true);
  rhs(stage_, k2_);

  base_ = x;
  propagate(base_, true);  // base_ = Eh x
  stage_ = base_ + 0.5 * h * k2_;
  rhs(stage_, k3_);

  stage_ = k3_;
  propagate(stage_, true);
  base_ = x;
  propagate(base_, false);  // base_ = E x
  stage_ = base_ + h * stage_;
  rhs(stage_, k4_);

  propagate(k1_, false);
  k2_ += k3_;
  propagate(k2_, true);
  x = base_ + (h / 6.0) * (k1_ + 2.0 * k2_ + k4_);
}

GalerkinModel::GalerkinModel(const Domain& domain, std::size_t modes, int components, NonlinearitySpec spec)
    : domain_(domain), spectrum_(build_spectrum(domain, modes, components)), spec_(std::move(spec)) {
  if (!(spec_.gamma > 0.0)) throw InvalidInput("damping gamma must be positive");
  if (spec_.rotational && components != 2) {
    throw InvalidInput("the rotational term needs exactly two components");
  }
  if (!spec_.potential.empty() && spec_.potential.variables() != components) {
    throw InvalidInput("potential has " + std::to_string(spec_.potential.variables()) + " variables but the model has " +
                       std::to_string(components) + " components");
  }
  if (has_forcing() && (static_cast<std::size_t>(spec_.forcing.rows()) != modes || spec_.forcing.cols() != components)) {
    throw InvalidInput("forcing must be an M x N coefficient matrix");
  }
  const int degree = spec_.potential.empty() ? 2 : spec_.potential.degree();
  grid_ = std::make_unique<Collocation>(domain_, spectrum_,
                                        Collocation::dealiased_points(spectrum_, domain_.dim(), degree));
}

GalerkinState GalerkinModel::zero_state() const {
  const auto m = static_cast<Eigen::Index>(modes());
  return {Eigen::MatrixXd::Zero(m, components()), Eigen::MatrixXd::Zero(m, components()), 0.0};
}

GalerkinState GalerkinModel::random_state(std::uint64_t seed, double amplitude) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GalerkinState s = zero_state();
  for (Eigen::Index r = 0; r < s.u.cols(); ++r) {
    for (Eigen::Index k = 0; k < s.u.rows(); ++k) {
      const double lam = spectrum_.lambdas[static_cast<std::size_t>(k)];
      s.u(k, r) = amplitude * normal(rng) / lam;
      s.v(k, r) = amplitude * normal(rng) / std::sqrt(lam);
    }
  }
  return s;
}

void GalerkinModel::pointwise_force(const Eigen::MatrixXd& ugrid, Eigen::MatrixXd& out) const {
  const int n = components();
  out.setZero(ugrid.rows(), n);
  std::vector<double> u(static_cast<std::size_t>(n));
  std::vector<double> g(static_cast<std::size_t>(n));
  const bool grad = !spec_.potential.empty();
  const double gam = spec_.gamma;
  const double b = spec_.rotation_strength;
  for (Eigen::Index p = 0; p < ugrid.rows(); ++p) {
    for (int r = 0; r < n; ++r) u[static_cast<std::size_t>(r)] = ugrid(p, r);
    if (grad) {
      spec_.potential.gradient(u, g);
      for (int r = 0; r < n; ++r) out(p, r) = g[static_cast<std::size_t>(r)];
    }
    if (spec_.rotational) {
      out(p, 0) += gam * b * std::sin(u[1] / gam);
      out(p, 1) -= gam * b * std::sin(u[0] / gam);
    }
  }
}

void GalerkinModel::pointwise_jacobian(const Eigen::MatrixXd& ugrid, Eigen::MatrixXd& out) const {
  const int n = components();
  out.setZero(ugrid.rows(), n * n);
  std::vector<double> u(static_cast<std::size_t>(n));
  std::vector<double> h(static_cast<std::size_t>(n * n));
  const bool grad = !spec_.potential.empty();
  const double gam = spec_.gamma;
  const double b = spec_.rotation_strength;
  for (Eigen::Index p = 0; p < ugrid.rows(); ++p) {
    for (int r = 0; r < n; ++r) u[static_cast<std::size_t>(r)] = ugrid(p, r);
    if (grad) {
      spec_.potential.hessian(u, h);
      for (int i = 0; i < n * n; ++i) out(p, i) = h[static_cast<std::size_t>(i)];
    }
    if (spec_.rotational) {
      out(p, 1) += b * std::cos(u[1] / gam);
      out(p, 2) -= b * std::cos(u[0] / gam);
    }
  }
}

std::vector<double> GalerkinModel::jacobian_at_zero() const {
  const int n = components();
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, n);
  Eigen::MatrixXd jac;
  pointwise_jacobian(zero, jac);
  return std::vector<double>(jac.data(), jac.data() + jac.size());
}

void GalerkinModel::eval_nonlinearity(const Eigen::MatrixXd& u, Eigen::MatrixXd& out) {
  if (static_cast<std::size_t>(u.rows()) != modes() || u.cols() != components()) {
    throw InvalidInput("eval_nonlinearity: coefficient matrix does not match the model size");
  }
  if (!has_nonlinearity()) {
    out.setZero(u.rows(), u.cols());
    return;
  }
  grid_->synthesize(u, ugrid_);
  pointwise_force(ugrid_, fgrid_);
  grid_->analyze(fgrid_, out);
}

Eigen::MatrixXd GalerkinModel::galerkin_jacobian(const Eigen::MatrixXd& u) {
  const auto m = static_cast<Eigen::Index>(modes());
  const int n = components();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m * n, m * n);
  if (!has_nonlinearity()) return out;
  grid_->synthesize(u, ugrid_);
  Eigen::MatrixXd jac;
  pointwise_jacobian(ugrid_, jac);
  Eigen::MatrixXd basis;
  grid_->synthesize(Eigen::MatrixXd::Identity(m, m), basis);
  Eigen::MatrixXd weighted(basis.rows(), m);
  Eigen::MatrixXd block;
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      const auto col = jac.col(r * n + s);
      if (col.isZero(0.0)) continue;
      weighted = col.asDiagonal() * basis;
      grid_->analyze(weighted, block);
      out.block(r * m, s * m, m, m) = block;
    }
  }
  return out;
}

void GalerkinModel::nonlinear_rhs(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) {
  const auto m = static_cast<Eigen::Index>(modes());
  out.resize(2 * m, x.cols());
  out.topRows(m).setZero();
  if (has_nonlinearity()) {
    eval_nonlinearity(x.topRows(m), tmp_);
    out.bottomRows(m) = -tmp_;
  } else {
    out.bottomRows(m).setZero();
  }
  if (has_forcing()) out.bottomRows(m) += spec_.forcing;
}

double GalerkinModel::potential_integral(const Eigen::MatrixXd& u) {
  if (spec_.potential.empty()) return 0.0;
  grid_->synthesize(u, ugrid_);
  const int n = components();
  std::vector<double> point(static_cast<std::size_t>(n), 0.0);
  const double at_boundary = spec_.potential.value(point);
  double sum = 0.0;
  for (Eigen::Index p = 0; p < ugrid_.rows(); ++p) {
    for (int r = 0; r < n; ++r) point[static_cast<std::size_t>(r)] = ugrid_(p, r);
    sum += spec_.potential.value(point);
  }
  return grid_->cell_volume() * sum + grid_->boundary_weight() * at_boundary;
}

double GalerkinModel::u_linf(const Eigen::MatrixXd& u) {
  grid_->synthesize(u, ugrid_);
  if (ugrid_.rows() == 0) return 0.0;
  return ugrid_.rowwise().norm().maxCoeff();
}

double GalerkinModel::energy_norm_sq(const GalerkinState& s) const {
  double e = 0.0;
  for (Eigen::Index k = 0; k < s.u.rows(); ++k) {
    e += spectrum_.lambdas[static_cast<std::size_t>(k)] * s.u.row(k).squaredNorm();
  }
  return e + s.v.squaredNorm();
}

double GalerkinModel::psi(const GalerkinState& s) {
  const double eps = 0.5 * spec_.gamma;
  double value = 0.5 * energy_norm_sq(s) + eps * s.u.cwiseProduct(s.v).sum() + potential_integral(s.u) +
                 0.5 * spec_.gamma * eps * s.u.squaredNorm();
  if (has_forcing()) value -= spec_.forcing.cwiseProduct(s.u).sum();
  return value;
}

double GalerkinModel::lyapunov_functional(const GalerkinState& s) {
  if (spec_.rotational) throw InvalidInput("the Lyapunov functional is defined only without the rotational term");
  double value = 0.5 * energy_norm_sq(s) + potential_integral(s.u);
  if (has_forcing()) value += spec_.forcing.cwiseProduct(s.u).sum();
  return value;
}

double GalerkinModel::max_step() const { return 0.5 / std::sqrt(spectrum_.last()); }

void GalerkinModel::step(GalerkinState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  if (dt > max_step() * (1.0 + 1e-12)) {
    throw InvalidInput("time step " + std::to_string(dt) + " exceeds the resolution limit 0.5/sqrt(lambda_M) = " +
                       std::to_string(max_step()));
  }
  if (!stepper_ || stepper_h_ != dt) {
    std::vector<ExponentialRk4::Block> blocks(1);
    blocks[0].first = 0;
    blocks[0].count = components();
    blocks[0].propagator = ModePropagator::wave(spectrum_.lambdas, spec_.gamma, dt);
    stepper_ = std::make_unique<ExponentialRk4>(std::move(blocks));
    stepper_h_ = dt;
  }
  const auto m = static_cast<Eigen::Index>(modes());
  Eigen::MatrixXd x(2 * m, components());
  x.topRows(m) = s.u;
  x.bottomRows(m) = s.v;
  const double before = energy_norm_sq(s);
  if (has_nonlinearity() || has_forcing()) {
    stepper_->step(x, [this](const Eigen::MatrixXd& y, Eigen::MatrixXd& out) { nonlinear_rhs(y, out); });
  } else {
    stepper_->step(x, nullptr);
  }
  s.u = x.topRows(m);
  s.v = x.bottomRows(m);
  s.time += dt;
  const double after = energy_norm_sq(s);
  if (!std::isfinite(after) || (before > 1e-300 && after > 1e6 * before && after > 1e-12)) {
    throw NumericFailure("integration unstable at t = " + std::to_string(s.time) + ": energy norm grew from " +
                         std::to_string(std::sqrt(before)) + " to " + std::to_string(std::sqrt(after)));
  }
}

namespace {

std::size_t step_count(double duration, double dt) {
  if (!(duration >= 0.0)) throw InvalidInput("duration must be non-negative");
  if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  if (duration == 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

TrajectorySample sample_of(GalerkinModel& model, const GalerkinState& s) {
  TrajectorySample out;
  out.t = s.time;
  out.energy = std::sqrt(model.energy_norm_sq(s));
  out.psi = model.psi(s);
  out.lyapunov = model.spec().rotational ? std::numeric_limits<double>::quiet_NaN() : model.lyapunov_functional(s);
  out.u_linf = model.u_linf(s.u);
  return out;
}

}  // namespace

Trajectory simulate(GalerkinModel& model, const GalerkinState& initial, double duration, double dt, std::size_t stride,
                    bool keep_states) {
  if (stride == 0) throw InvalidInput("sampling stride must be at least 1");
  const std::size_t steps = step_count(duration, dt);
  const double h = steps == 0 ? dt : duration / static_cast<double>(steps);
  const double t0 = initial.time;
  Trajectory traj;
  GalerkinState s = initial;
  traj.samples.push_back(sample_of(model, s));
  if (keep_states) traj.states.push_back(s);
  for (std::size_t i = 1; i <= steps; ++i) {
    model.step(s, h);
    s.time = t0 + static_cast<double>(i) * h;
    if (i % stride == 0 || i == steps) {
      traj.samples.push_back(sample_of(model, s));
      if (keep_states) traj.states.push_back(s);
    }
  }
  traj.final_state = std::move(s);
  return traj;
}

GalerkinState advance(GalerkinModel& model, const GalerkinState& initial, double duration, double dt) {
  const std::size_t steps = step_count(duration, dt);
  const double h = steps == 0 ? dt : duration / static_cast<double>(steps);
  const double t0 = initial.time;
  GalerkinState s = initial;
  for (std::size_t i = 1; i <= steps; ++i) {
    model.step(s, h);
    s.time = t0 + static_cast<double>(i) * h;
  }
  return s;
}

double estimate_Bd(GalerkinModel& model, const std::vector<GalerkinState>& samples, int d) {
  if (d < 1) throw InvalidInput("B_d needs d >= 1");
  if (samples.size() < 10) {
    throw InvalidInput("insufficient trajectory samples for B_d: " + std::to_string(samples.size()) + " < 10");
  }
  Collocation& grid = model.collocation();
  const std::vector<double> j0 = model.jacobian_at_zero();
  double boundary = 0.0;
  for (double x : j0) boundary += x * x;
  boundary = std::sqrt(boundary);

  Eigen::MatrixXd ugrid;
  Eigen::MatrixXd jac;
  double running_max = 0.0;
  double sum = 0.0;
  for (const GalerkinState& s : samples) {
    grid.synthesize(s.u, ugrid);
    model.pointwise_jacobian(ugrid, jac);
    const Eigen::VectorXd norms = jac.rowwise().norm();
    double value = 0.0;
    if (d <= 2) {
      value = std::max(boundary, norms.size() > 0 ? norms.maxCoeff() : 0.0);
    } else {
      const double integral = grid.cell_volume() * norms.array().pow(d).sum() +
                              grid.boundary_weight() * std::pow(boundary, d);
      value = std::pow(integral, 1.0 / d);
    }
    running_max = std::max(running_max, value);
    sum += value;
  }
  return d == 2 ? sum / static_cast<double>(samples.size()) : running_max;
}

}  // namespace wavedim
