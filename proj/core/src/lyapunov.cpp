#include "wavedim/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "wavedim/error.hpp"

namespace wavedim {

double epsilon_max(double gamma, double lambda1) { return std::min(gamma / 4.0, lambda1 / (2.0 * gamma)); }

double default_epsilon(double gamma, double lambda1) { return std::min(gamma / 4.0, epsilon_max(gamma, lambda1)); }

std::array<double, 4> shifted_block(double lambda, double gamma, double eps) {
  const double root = std::sqrt(lambda);
  return {-eps, root, -root + eps * (gamma - eps) / root, -(gamma - eps)};
}

namespace {

void check_epsilon(const GalerkinModel& model, double eps) {
  const double top = epsilon_max(model.gamma(), model.spectrum().first());
  if (!(eps >= 0.0) || eps > top * (1.0 + 1e-12)) {
    throw InvalidInput("shift epsilon = " + std::to_string(eps) + " outside [0, " + std::to_string(top) + "]");
  }
}

}  // namespace

VariationalBundle::VariationalBundle(GalerkinModel& model, const GalerkinState& base, const Eigen::MatrixXd& initial,
                                     double epsilon)
    : model_(&model), epsilon_(epsilon), count_(static_cast<std::size_t>(initial.cols())), time_(base.time) {
  check_epsilon(model, epsilon);
  const auto m = static_cast<Eigen::Index>(model.modes());
  const Eigen::Index n = model.components();
  if (initial.rows() != 2 * m * n) {
    throw InvalidInput("tangent vectors must have length 2MN = " + std::to_string(2 * m * n));
  }
  if (base.u.rows() != m || base.u.cols() != n || base.v.rows() != m || base.v.cols() != n) {
    throw InvalidInput("base state does not match the model size");
  }
  const auto k = static_cast<Eigen::Index>(count_);
  state_.resize(2 * m, n + n * k);
  state_.block(0, 0, m, n) = base.u;
  state_.block(m, 0, m, n) = base.v;
  if (k > 0) tangents() = initial;
  inv_sqrt_lambda_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    inv_sqrt_lambda_(i) = 1.0 / std::sqrt(model.spectrum().lambdas[static_cast<std::size_t>(i)]);
  }
}

GalerkinState VariationalBundle::base() const {
  const auto m = static_cast<Eigen::Index>(model_->modes());
  const Eigen::Index n = model_->components();
  return {state_.block(0, 0, m, n), state_.block(m, 0, m, n), time_};
}

Eigen::Map<Eigen::MatrixXd> VariationalBundle::tangents() {
  const auto m = static_cast<Eigen::Index>(model_->modes());
  const Eigen::Index n = model_->components();
  return Eigen::Map<Eigen::MatrixXd>(state_.data() + 2 * m * n, 2 * m * n, static_cast<Eigen::Index>(count_));
}

void VariationalBundle::rhs(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) {
  const auto m = static_cast<Eigen::Index>(model_->modes());
  const int n = model_->components();
  const Eigen::Index tcols = x.cols() - n;
  out.setZero(x.rows(), x.cols());
  Collocation& grid = model_->collocation();
  if (model_->has_nonlinearity()) {
    grid.synthesize(x.topLeftCorner(m, n), ugrid_);
    model_->pointwise_force(ugrid_, fgrid_);
    grid.analyze(fgrid_, coeffs_);
    out.block(m, 0, m, n) = -coeffs_;
    if (tcols > 0) {
      model_->pointwise_jacobian(ugrid_, jac_);
      phi_ = inv_sqrt_lambda_.asDiagonal() * x.block(0, n, m, tcols);
      grid.synthesize(phi_, phigrid_);
      wgrid_.setZero(phigrid_.rows(), tcols);
      const Eigen::Index k = tcols / n;
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          const auto j = jac_.col(r * n + s);
          if (j.isZero(0.0)) continue;
          for (Eigen::Index t = 0; t < k; ++t) {
            wgrid_.col(t * n + r) += j.cwiseProduct(phigrid_.col(t * n + s));
          }
        }
      }
      grid.analyze(wgrid_, coeffs_);
      out.block(m, n, m, tcols) = -coeffs_;
    }
  }
  if (model_->has_forcing()) out.block(m, 0, m, n) += model_->spec().forcing;
}

void VariationalBundle::variational_rhs(Eigen::MatrixXd& out) {
  const auto m = static_cast<Eigen::Index>(model_->modes());
  const int n = model_->components();
  const auto k = static_cast<Eigen::Index>(count_);
  Eigen::MatrixXd full;
  rhs(state_, full);
  // add the linear part
  const double gamma = model_->gamma();
  for (Eigen::Index c = n; c < n + n * k; ++c) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto a = shifted_block(model_->spectrum().lambdas[static_cast<std::size_t>(i)], gamma, epsilon_);
      const double p = state_(i, c);
      const double q = state_(m + i, c);
      full(i, c) += a[0] * p + a[1] * q;
      full(m + i, c) += a[2] * p + a[3] * q;
    }
  }
  out = Eigen::Map<const Eigen::MatrixXd>(full.data() + 2 * m * n, 2 * m * n, k);
}

void VariationalBundle::make_stepper(double dt) {
  const int n = model_->components();
  const auto& lambdas = model_->spectrum().lambdas;
  std::vector<std::array<double, 4>> gens;
  gens.reserve(lambdas.size());
  for (double lam : lambdas) gens.push_back(shifted_block(lam, model_->gamma(), epsilon_));
  std::vector<ExponentialRk4::Block> blocks;
  blocks.push_back({0, n, ModePropagator::wave(lambdas, model_->gamma(), dt)});
  if (count_ > 0) blocks.push_back({n, n * static_cast<Eigen::Index>(count_), ModePropagator(gens, dt)});
  stepper_ = std::make_unique<ExponentialRk4>(std::move(blocks));
  stepper_h_ = dt;
}

void VariationalBundle::step(double dt) {
  if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  if (dt > model_->max_step() * (1.0 + 1e-12)) {
    throw InvalidInput("time step exceeds the resolution limit 0.5/sqrt(lambda_M)");
  }
  if (!stepper_ || stepper_h_ != dt) make_stepper(dt);
  if (model_->has_nonlinearity() || model_->has_forcing()) {
    stepper_->step(state_, [this](const Eigen::MatrixXd& x, Eigen::MatrixXd& out) { rhs(x, out); });
  } else {
    stepper_->step(state_, nullptr);
  }
  time_ += dt;
  if (!state_.allFinite()) {
    throw NumericFailure("variational integration produced non-finite values at t = " + std::to_string(time_));
  }
}

std::vector<double> VariationalBundle::orthonormalize() {
  auto y = tangents();
  const Eigen::Index k = y.cols();
  std::vector<double> logs(static_cast<std::size_t>(k));
  if (k == 0) return logs;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  const Eigen::MatrixXd& r = qr.matrixQR();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double d = r(j, j);
    if (d == 0.0 || !std::isfinite(d)) throw NumericFailure("tangent vectors became linearly dependent");
    logs[static_cast<std::size_t>(j)] = std::log(std::abs(d));
    if (d < 0.0) q.col(j) = -q.col(j);
  }
  y = q;
  return logs;
}

Eigen::MatrixXd generator_matrix(GalerkinModel& model, const Eigen::MatrixXd& u, double epsilon) {
  check_epsilon(model, epsilon);
  const auto m = static_cast<Eigen::Index>(model.modes());
  const Eigen::Index n = model.components();
  const auto& lambdas = model.spectrum().lambdas;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * m * n, 2 * m * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index off = r * 2 * m;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto a = shifted_block(lambdas[static_cast<std::size_t>(i)], model.gamma(), epsilon);
      g(off + i, off + i) = a[0];
      g(off + i, off + m + i) = a[1];
      g(off + m + i, off + i) = a[2];
      g(off + m + i, off + m + i) = a[3];
    }
  }
  if (model.has_nonlinearity()) {
    const Eigen::MatrixXd jac = model.galerkin_jacobian(u);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index k = 0; k < m; ++k) {
          const double scale = 1.0 / std::sqrt(lambdas[static_cast<std::size_t>(k)]);
          for (Eigen::Index j = 0; j < m; ++j) {
            g(r * 2 * m + m + j, s * 2 * m + k) -= jac(r * m + j, s * m + k) * scale;
          }
        }
      }
    }
  }
  return g;
}

std::vector<double> n_traces(const Eigen::MatrixXd& generator, std::size_t count) {
  const Eigen::MatrixXd sym = 0.5 * (generator + generator.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("symmetric eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  count = std::min<std::size_t>(count, static_cast<std::size_t>(ev.size()));
  std::vector<double> out(count);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    acc += ev(ev.size() - 1 - static_cast<Eigen::Index>(i));
    out[i] = acc;
  }
  return out;
}

std::vector<double> equilibrium_exponents(GalerkinModel& model, const Eigen::MatrixXd& u) {
  const auto m = static_cast<Eigen::Index>(model.modes());
  const Eigen::Index n = model.components();
  const auto& lambdas = model.spectrum().lambdas;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m * n, 2 * m * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index off = r * 2 * m;
    for (Eigen::Index i = 0; i < m; ++i) {
      a(off + i, off + m + i) = 1.0;
      a(off + m + i, off + i) = -lambdas[static_cast<std::size_t>(i)];
      a(off + m + i, off + m + i) = -model.gamma();
    }
  }
  if (model.has_nonlinearity()) {
    const Eigen::MatrixXd jac = model.galerkin_jacobian(u);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index s = 0; s < n; ++s) {
        a.block(r * 2 * m + m, s * 2 * m, m, m) -= jac.block(r * m, s * m, m, m);
      }
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw NumericFailure("eigensolver failed on the linearization");
  std::vector<double> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i).real();
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double ky_dimension(std::span<const double> exponents) {
  if (exponents.empty() || exponents[0] < 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const double next = sum + exponents[i];
    if (next < 0.0) return static_cast<double>(i) + sum / std::abs(exponents[i]);
    sum = next;
  }
  return static_cast<double>(exponents.size());
}

double growth_rate_estimate(GalerkinModel& model, const Eigen::MatrixXd& u) {
  Eigen::MatrixXd ugrid;
  Eigen::MatrixXd jac;
  model.collocation().synthesize(u, ugrid);
  model.pointwise_jacobian(ugrid, jac);
  double sup = 0.0;
  for (double x : model.jacobian_at_zero()) sup += x * x;
  sup = std::sqrt(sup);
  if (jac.rows() > 0) sup = std::max(sup, jac.rowwise().norm().maxCoeff());
  return model.gamma() + sup / std::sqrt(model.spectrum().first());
}

LyapunovReport compute_exponents(GalerkinModel& model, const GalerkinState& initial, const LyapunovOptions& options) {
  const std::size_t dim = 2 * model.modes() * static_cast<std::size_t>(model.components());
  const std::size_t k = options.tangents == 0 ? dim : options.tangents;
  if (k > dim) throw InvalidInput("tangent count " + std::to_string(k) + " exceeds 2MN = " + std::to_string(dim));
  if (!(options.duration > 0.0)) throw InvalidInput("averaging window must be positive");
  if (!(options.qr_interval > 0.0)) throw InvalidInput("QR interval must be positive");
  const double eps = options.epsilon < 0.0 ? default_epsilon(model.gamma(), model.spectrum().first()) : options.epsilon;

  const double rate = growth_rate_estimate(model, initial.u);
  if (options.qr_interval * rate > 1.0) {
    throw InvalidInput("QR interval " + std::to_string(options.qr_interval) + " too long for growth rate estimate " +
                       std::to_string(rate));
  }

  const double max_dt = options.dt > 0.0 ? std::min(options.dt, model.max_step()) : model.max_step();
  const auto substeps = static_cast<std::size_t>(std::ceil(options.qr_interval / max_dt - 1e-9));
  const double h = options.qr_interval / static_cast<double>(substeps);
  const auto intervals = static_cast<std::size_t>(std::ceil(options.duration / options.qr_interval - 1e-9));
  const std::size_t half = intervals / 2;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd start(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < start.cols(); ++j) {
    for (Eigen::Index i = 0; i < start.rows(); ++i) start(i, j) = normal(rng);
  }
  VariationalBundle bundle(model, initial, start, eps);
  bundle.orthonormalize();

  std::vector<double> first(k, 0.0);
  std::vector<double> second(k, 0.0);
  std::vector<double> q(k, 0.0);
  std::size_t q_count = 0;
  for (std::size_t it = 0; it < intervals; ++it) {
    for (std::size_t s = 0; s < substeps; ++s) bundle.step(h);
    const std::vector<double> logs = bundle.orthonormalize();
    auto& acc = it < half ? first : second;
    for (std::size_t j = 0; j < k; ++j) acc[j] += logs[j];
    if (options.q_every > 0 && (it + 1) % options.q_every == 0) {
      const GalerkinState b = bundle.base();
      const std::vector<double> tr = n_traces(generator_matrix(model, b.u, eps), k);
      for (std::size_t j = 0; j < k; ++j) q[j] += tr[j];
      ++q_count;
    }
  }

  const double total = static_cast<double>(intervals) * options.qr_interval;
  LyapunovReport rep;
  rep.dimension = dim;
  rep.epsilon = eps;
  rep.duration = total;
  rep.exponents.resize(k);
  for (std::size_t j = 0; j < k; ++j) rep.exponents[j] = (first[j] + second[j]) / total;
  std::sort(rep.exponents.begin(), rep.exponents.end(), std::greater<>());
  rep.cumulative.resize(k);
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) rep.cumulative[j] = acc += rep.exponents[j];
  rep.ky_dimension = ky_dimension(rep.exponents);
  rep.truncated = k < dim && !rep.cumulative.empty() && rep.cumulative.back() >= 0.0;

  if (half > 0 && intervals - half > 0) {
    std::vector<double> a(k);
    std::vector<double> b(k);
    for (std::size_t j = 0; j < k; ++j) {
      a[j] = first[j] / (static_cast<double>(half) * options.qr_interval);
      b[j] = second[j] / (static_cast<double>(intervals - half) * options.qr_interval);
    }
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(b.begin(), b.end(), std::greater<>());
    const double floor = 0.5 * model.gamma();
    for (std::size_t j = 0; j < k; ++j) {
      const double scale = 0.05 * std::max({std::abs(a[j]), std::abs(b[j]), floor});
      rep.drift = std::max(rep.drift, std::abs(a[j] - b[j]) / scale);
    }
    rep.converged = rep.drift <= 1.0;
  }
  if (q_count > 0) {
    rep.q_samples.resize(k);
    for (std::size_t j = 0; j < k; ++j) rep.q_samples[j] = q[j] / static_cast<double>(q_count);
  }
  rep.q_sample_count = q_count;
  rep.final_state = bundle.base();
  return rep;
}

std::vector<double> q_of_n(GalerkinModel& model, const GalerkinState& initial, std::size_t n_max, double duration,
                           double dt, double sample_interval, double epsilon) {
  const std::size_t dim = 2 * model.modes() * static_cast<std::size_t>(model.components());
  if (n_max > dim) throw InvalidInput("q(n) needs n <= 2MN = " + std::to_string(dim));
  if (n_max == 0) return {};
  if (!(sample_interval > 0.0)) throw InvalidInput("sample interval must be positive");
  const auto samples = static_cast<std::size_t>(std::floor(duration / sample_interval + 1e-9));
  if (!(dt > 0.0)) dt = model.max_step();
  std::vector<double> q(n_max, 0.0);
  GalerkinState s = initial;
  std::size_t used = 0;
  for (std::size_t i = 0; i <= samples; ++i) {
    if (i > 0) s = advance(model, s, sample_interval, dt);
    const std::vector<double> tr = n_traces(generator_matrix(model, s.u, epsilon), n_max);
    for (std::size_t j = 0; j < n_max; ++j) q[j] += tr[j];
    ++used;
  }
  for (double& x : q) x /= static_cast<double>(used);
  return q;
}

}  // namespace wavedim
