#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wavedim/collocation.hpp"
#include "wavedim/dynamics.hpp"
#include "wavedim/error.hpp"

using namespace wavedim;
using std::numbers::pi;

namespace {

NonlinearitySpec quartic(double gamma) {
  NonlinearitySpec s;
  s.gamma = gamma;
  s.potential = Polynomial::separable_power(1, 0.25, 4);
  return s;
}

NonlinearitySpec rotational(double gamma, double b = 1.0) {
  NonlinearitySpec s;
  s.gamma = gamma;
  s.rotational = true;
  s.rotation_strength = b;
  return s;
}

NonlinearitySpec linear(double gamma) {
  NonlinearitySpec s;
  s.gamma = gamma;
  return s;
}

const double kSinCoeff = std::sqrt(pi / 2.0);  // sin x in the normalized basis on (0, pi)

}  // namespace

TEST_CASE("nonlinearity evaluation") {
  SUBCASE("zero nonlinearity") {
    GalerkinModel m(Domain::interval(pi), 8, 1, linear(0.1));
    Eigen::MatrixXd f;
    m.eval_nonlinearity(m.random_state(3, 1.0).u, f);
    CHECK((f.size() == 0 || f.cwiseAbs().maxCoeff() == 0.0));
  }
  SUBCASE("cubic of sin x") {
    GalerkinModel m(Domain::interval(pi), 8, 1, quartic(0.1));
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(8, 1);
    u(0, 0) = kSinCoeff;
    Eigen::MatrixXd f;
    m.eval_nonlinearity(u, f);
    CHECK(f(0, 0) == doctest::Approx(0.75 * kSinCoeff).epsilon(1e-12));
    CHECK(f(2, 0) == doctest::Approx(-0.25 * kSinCoeff).epsilon(1e-12));
    CHECK(std::abs(f(1, 0)) < 1e-13);
    CHECK(std::abs(f(4, 0)) < 1e-13);
  }
  SUBCASE("rotational term vanishes at zero") {
    GalerkinModel m(Domain::interval(pi), 8, 2, rotational(0.1));
    Eigen::MatrixXd f;
    m.eval_nonlinearity(m.zero_state().u, f);
    CHECK(f.cwiseAbs().maxCoeff() == 0.0);
    const std::vector<double> j0 = m.jacobian_at_zero();
    CHECK(j0[0] == 0.0);
    CHECK(j0[1] == doctest::Approx(1.0));
    CHECK(j0[2] == doctest::Approx(-1.0));
    CHECK(j0[3] == 0.0);
  }
}

TEST_CASE("property: rotational term is small with bounded derivative") {
  for (double gamma : {0.2, 0.1, 0.01}) {
    GalerkinModel m(Domain::interval(pi), 4, 2, rotational(gamma));
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 5.0);
    Eigen::MatrixXd ug(500, 2);
    for (Eigen::Index i = 0; i < ug.rows(); ++i) {
      ug(i, 0) = n(rng);
      ug(i, 1) = n(rng);
    }
    Eigen::MatrixXd f;
    Eigen::MatrixXd jac;
    m.pointwise_force(ug, f);
    m.pointwise_jacobian(ug, jac);
    CHECK(f.rowwise().norm().maxCoeff() <= gamma * std::sqrt(2.0) * (1 + 1e-14));
    CHECK(jac.rowwise().norm().maxCoeff() <= std::sqrt(2.0) * (1 + 1e-14));
  }
}

TEST_CASE("rotational evaluation converges under grid refinement") {
  const Domain d = Domain::interval(pi);
  GalerkinModel m(d, 16, 2, rotational(0.1));
  const Eigen::MatrixXd u = m.random_state(4, 3.0).u;
  auto project = [&](int points) {
    Collocation grid(d, m.spectrum(), {points, 1, 1});
    Eigen::MatrixXd ug;
    Eigen::MatrixXd fg;
    Eigen::MatrixXd out;
    grid.synthesize(u, ug);
    m.pointwise_force(ug, fg);
    grid.analyze(fg, out);
    return out;
  };
  const Eigen::MatrixXd coarse = project(25);
  const Eigen::MatrixXd fine = project(200);
  const Eigen::MatrixXd finest = project(1600);
  const double e1 = (coarse - finest).norm();
  const double e2 = (fine - finest).norm();
  CHECK(e2 < e1);
  CHECK(e2 < 1e-3 * finest.norm());
}

TEST_CASE("exact linear propagation") {
  SUBCASE("undamped half period") {
    const ModePropagator p = ModePropagator::wave({1.0}, 0.0, pi);
    Eigen::MatrixXd x(2, 1);
    x << 1.0, 0.0;
    p.apply(x, false);
    CHECK(x(0, 0) == doctest::Approx(-1.0));
    CHECK(std::abs(x(1, 0)) < 1e-14);
  }
  SUBCASE("damped mode against the characteristic roots") {
    GalerkinModel m(Domain::interval(pi), 5, 1, linear(0.1));
    GalerkinState s = m.zero_state();
    s.u(4, 0) = 1.0;
    const Trajectory tr = simulate(m, s, 1.0, 0.1, 1);
    const double w = std::sqrt(25.0 - 0.0025);
    const double exact = std::exp(-0.05) * (std::cos(w) + 0.05 / w * std::sin(w));
    CHECK(std::abs(tr.final_state.u(4, 0) - exact) <= 1e-8 * std::abs(exact));
  }
  SUBCASE("every mode over unit time") {
    const double gamma = 0.3;
    GalerkinModel m(Domain::interval(pi), 20, 1, linear(gamma));
    const GalerkinState s0 = m.random_state(2, 1.0);
    const GalerkinState s1 = advance(m, s0, 1.0, m.max_step());
    for (Eigen::Index k = 0; k < 20; ++k) {
      const double lam = m.spectrum().lambdas[static_cast<std::size_t>(k)];
      const std::complex<double> root = std::sqrt(std::complex<double>(gamma * gamma / 4 - lam));
      const std::complex<double> mp = -gamma / 2 + root;
      const std::complex<double> mm = -gamma / 2 - root;
      // u = A e^{mp t} + B e^{mm t} with A + B = u0, mp A + mm B = v0
      const std::complex<double> a = (s0.v(k, 0) - mm * s0.u(k, 0)) / (mp - mm);
      const std::complex<double> b = s0.u(k, 0) - a;
      const double exact = (a * std::exp(mp) + b * std::exp(mm)).real();
      CHECK(std::abs(s1.u(k, 0) - exact) <= 1e-8 * std::max(std::abs(exact), std::abs(s0.u(k, 0))));
    }
  }
}

TEST_CASE("linear energy decays") {
  GalerkinModel m(Domain::interval(pi), 1, 1, linear(0.2));
  GalerkinState s = m.zero_state();
  s.u(0, 0) = 1.0;
  s.v(0, 0) = -0.3;
  const double e0 = m.energy_norm_sq(s);
  const GalerkinState s1 = advance(m, s, 10.0, 0.1);
  CHECK(m.energy_norm_sq(s1) <= e0);

  GalerkinModel big(Domain::interval(pi), 16, 1, linear(0.2));
  const GalerkinState b0 = big.random_state(9, 2.0);
  const Trajectory tr = simulate(big, b0, 10.0 / 0.2, big.max_step(), 1);
  CHECK(tr.samples.back().energy < tr.samples.front().energy);
  const double dt = big.max_step();
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    const double prev = tr.samples[i - 1].energy;
    const double cur = tr.samples[i].energy;
    const double e_prev = 0.5 * prev * prev;
    const double e_cur = 0.5 * cur * cur;
    CHECK(e_cur <= e_prev + 10 * dt * dt);
  }
}

TEST_CASE("dissipativity functional") {
  SUBCASE("zero state") {
    GalerkinModel m(Domain::interval(pi), 4, 1, quartic(0.2));
    CHECK(m.psi(m.zero_state()) == 0.0);
  }
  SUBCASE("single elastic mode") {
    GalerkinModel m(Domain::interval(pi), 1, 1, linear(0.2));
    GalerkinState s = m.zero_state();
    s.u(0, 0) = 1.0;
    // 1/2 |xi|^2 + 1/2 gamma eps |u|^2 with eps = gamma / 2
    CHECK(m.psi(s) == doctest::Approx(0.5 + 0.5 * 0.2 * 0.1));
  }
  SUBCASE("quartic potential of sin x") {
    GalerkinModel m(Domain::interval(pi), 8, 1, quartic(0.2));
    GalerkinState s = m.zero_state();
    s.u(0, 0) = kSinCoeff;
    const double expected = pi / 4 + 3 * pi / 32 + 0.5 * 0.2 * 0.1 * (pi / 2);
    CHECK(m.psi(s) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("Lyapunov functional") {
  GalerkinModel m(Domain::interval(pi), 16, 1, quartic(0.2));
  CHECK(m.lyapunov_functional(m.zero_state()) == 0.0);

  GalerkinModel rot(Domain::interval(pi), 4, 2, rotational(0.1));
  CHECK_THROWS_AS(rot.lyapunov_functional(rot.zero_state()), InvalidInput);

  SUBCASE("derivative equals minus gamma |u_t|^2") {
    GalerkinState s = m.zero_state();
    s.v(0, 0) = kSinCoeff;
    const double dt = 1e-4;
    const double l0 = m.lyapunov_functional(s);
    m.step(s, dt);
    const double rate = (m.lyapunov_functional(s) - l0) / dt;
    CHECK(rate == doctest::Approx(-0.2 * pi / 2).epsilon(0.01));
  }
  SUBCASE("non-increasing along gradient trajectories") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const GalerkinState s0 = m.random_state(seed, 4.0);
      const Trajectory tr = simulate(m, s0, 5.0, 1e-3, 10);
      for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const double span = tr.samples[i].t - tr.samples[i - 1].t;
        CHECK(tr.samples[i].lyapunov - tr.samples[i - 1].lyapunov <= 1e-6 * span);
      }
    }
  }
}

TEST_CASE("gradient trajectories settle") {
  GalerkinModel m(Domain::interval(pi), 8, 1, quartic(0.5));
  const GalerkinState s = advance(m, m.random_state(5, 2.0), 60.0, 0.02);
  CHECK(s.v.norm() < 1e-3);
}

TEST_CASE("step preconditions") {
  GalerkinModel m(Domain::interval(pi), 16, 1, linear(0.1));
  GalerkinState s = m.zero_state();
  CHECK(m.max_step() == doctest::Approx(0.5 / 16));
  CHECK_THROWS_AS(m.step(s, 0.1), InvalidInput);
  CHECK_THROWS_AS(m.step(s, -1.0), InvalidInput);
  CHECK_THROWS_AS(GalerkinModel(Domain::interval(pi), 4, 1, rotational(0.1)), InvalidInput);
  NonlinearitySpec bad = linear(0.0);
  CHECK_THROWS_AS(GalerkinModel(Domain::interval(pi), 4, 1, bad), InvalidInput);
}

TEST_CASE("trajectories are deterministic") {
  GalerkinModel a(Domain::interval(pi), 24, 2, rotational(0.1));
  GalerkinModel b(Domain::interval(pi), 24, 2, rotational(0.1));
  const GalerkinState x = advance(a, a.random_state(8, 1.0), 5.0, a.max_step());
  const GalerkinState y = advance(b, b.random_state(8, 1.0), 5.0, b.max_step());
  CHECK(x.u == y.u);
  CHECK(x.v == y.v);
}

TEST_CASE("B_d estimates") {
  SUBCASE("constant derivative in 1D") {
    NonlinearitySpec s;
    s.gamma = 0.1;
    s.potential = Polynomial(1, {{0.5 * 1.7, {2}}});
    GalerkinModel m(Domain::interval(pi), 8, 1, s);
    std::vector<GalerkinState> samples(12, m.random_state(1, 1.0));
    CHECK(estimate_Bd(m, samples, 1) == doctest::Approx(1.7));
  }
  SUBCASE("constant derivative on a 3-box") {
    NonlinearitySpec s;
    s.gamma = 0.1;
    s.potential = Polynomial(1, {{0.5 * 2.0, {2}}});
    GalerkinModel m(Domain::box({1.0, 2.0, 1.5}), 6, 1, s);
    std::vector<GalerkinState> samples(10, m.random_state(1, 1.0));
    CHECK(estimate_Bd(m, samples, 3) == doctest::Approx(2.0 * std::cbrt(3.0)).epsilon(1e-10));
  }
  SUBCASE("quartic: three times the squared sup norm") {
    GalerkinModel m(Domain::interval(pi), 16, 1, quartic(0.1));
    const Trajectory tr = simulate(m, m.random_state(2, 3.0), 5.0, m.max_step(), 4, true);
    double expected = 0.0;
    for (const GalerkinState& st : tr.states) expected = std::max(expected, 3.0 * std::pow(m.u_linf(st.u), 2));
    CHECK(estimate_Bd(m, tr.states, 1) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("too few samples") {
    GalerkinModel m(Domain::interval(pi), 4, 1, quartic(0.1));
    std::vector<GalerkinState> samples(5, m.zero_state());
    CHECK_THROWS_AS(estimate_Bd(m, samples, 1), InvalidInput);
  }
}

TEST_CASE("absorbing ball is entered within a time of order 1/gamma") {
  const std::vector<double> gammas{0.2, 0.1, 0.05};
  std::vector<double> radii;
  std::vector<Trajectory> runs;
  for (double gamma : gammas) {
    GalerkinModel m(Domain::interval(pi), 16, 2, rotational(gamma));
    const double dt = m.max_step();
    const GalerkinState settled = advance(m, m.random_state(1, 1.0), 20.0 / gamma, dt);
    const Trajectory probe = simulate(m, settled, 10.0 / gamma, dt, 8);
    double radius = 0.0;
    for (const TrajectorySample& s : probe.samples) radius = std::max(radius, s.energy);
    GalerkinState start = m.random_state(2, 1.0);
    const double scale = 10.0 * radius / std::sqrt(m.energy_norm_sq(start));
    start.u *= scale;
    start.v *= scale;
    radii.push_back(radius);
    runs.push_back(simulate(m, start, 40.0 / gamma, dt, 4));
  }
  const double ball = 2.0 * *std::max_element(radii.begin(), radii.end());
  auto entry = [](const Trajectory& tr, double level) {
    for (const TrajectorySample& s : tr.samples) {
      if (s.energy <= level) return s.t;
    }
    return std::numeric_limits<double>::infinity();
  };
  std::vector<double> uniform;
  std::vector<double> halving;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    CHECK(runs[i].samples.front().energy == doctest::Approx(10.0 * radii[i]).epsilon(1e-9));
    uniform.push_back(entry(runs[i], ball) * gammas[i]);
    halving.push_back(entry(runs[i], 5.0 * radii[i]) * gammas[i]);
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    REQUIRE(std::isfinite(uniform[i]));
    CHECK(uniform[i] <= 2.0 * uniform[0] + 1.0);
    CHECK(halving[i] <= 1.5 * halving[0]);
    CHECK(halving[i] >= halving[0] / 1.5);
  }
}
