#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "wavedim/bounds.hpp"
#include "wavedim/error.hpp"
#include "wavedim/lyapunov.hpp"

using namespace wavedim;
using std::numbers::pi;

namespace {

NonlinearitySpec linear(double gamma) {
  NonlinearitySpec s;
  s.gamma = gamma;
  return s;
}

NonlinearitySpec rotational(double gamma) {
  NonlinearitySpec s;
  s.gamma = gamma;
  s.rotational = true;
  return s;
}

NonlinearitySpec constant_derivative(double gamma, double a0) {
  NonlinearitySpec s;
  s.gamma = gamma;
  s.potential = Polynomial(1, {{0.5 * a0, {2}}});
  return s;
}

std::vector<double> quadratic_real_parts(double gamma, const std::vector<double>& nus) {
  std::vector<double> out;
  for (double nu : nus) {
    const std::complex<double> root = std::sqrt(std::complex<double>(gamma * gamma - 4.0 * nu, 0.0));
    out.push_back(((-gamma + root) / 2.0).real());
    out.push_back(((-gamma - root) / 2.0).real());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

TEST_CASE("shift bounds") {
  CHECK(epsilon_max(0.2, 1.0) == doctest::Approx(0.05));
  CHECK(epsilon_max(4.0, 1.0) == doctest::Approx(0.125));
  CHECK(default_epsilon(0.2, 1.0) == doctest::Approx(0.05));
  GalerkinModel m(Domain::interval(pi), 4, 1, linear(0.2));
  CHECK_THROWS_AS(VariationalBundle(m, m.zero_state(), Eigen::MatrixXd::Identity(8, 2), 0.3), InvalidInput);
}

TEST_CASE("variational right-hand side reproduces the shifted linear block") {
  const double gamma = 0.2;
  const double eps = 0.05;
  GalerkinModel m(Domain::interval(pi), 3, 1, linear(gamma));
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(6, 1);
  t(1, 0) = 0.7;  // sqrt(lambda) phi of mode 2
  t(4, 0) = -0.4;  // psi of mode 2
  VariationalBundle bundle(m, m.zero_state(), t, eps);
  Eigen::MatrixXd out;
  bundle.variational_rhs(out);
  const double root = 2.0;
  CHECK(out(1, 0) == doctest::Approx(-eps * 0.7 + root * -0.4));
  CHECK(out(4, 0) == doctest::Approx((-root + eps * (gamma - eps) / root) * 0.7 - (gamma - eps) * -0.4));
  CHECK(out(0, 0) == 0.0);
  CHECK(out(3, 0) == 0.0);
  const auto a = shifted_block(4.0, gamma, eps);
  CHECK(a[0] == doctest::Approx(-eps));
  CHECK(a[3] == doctest::Approx(-(gamma - eps)));
}

TEST_CASE("linear exponents equal minus gamma over two") {
  GalerkinModel m(Domain::interval(pi), 16, 1, linear(0.2));
  LyapunovOptions o;
  o.tangents = 4;
  o.duration = 2000;
  const LyapunovReport r = compute_exponents(m, m.random_state(1, 1.0), o);
  REQUIRE(r.exponents.size() == 4);
  for (double x : r.exponents) CHECK(x == doctest::Approx(-0.1).epsilon(1e-4 / 0.1));
  CHECK(r.ky_dimension == 0.0);
  CHECK(r.converged);

  SUBCASE("zero shift reduces to the plain linearization") {
    o.epsilon = 0.0;
    const LyapunovReport z = compute_exponents(m, m.random_state(1, 1.0), o);
    for (double x : z.exponents) CHECK(x == doctest::Approx(-0.1).epsilon(1e-4 / 0.1));
  }
}

TEST_CASE("constant derivative: exponents are the roots of the characteristic quadratic") {
  const double gamma = 0.1;
  const double a0 = -2.0;
  GalerkinModel m(Domain::interval(pi), 4, 1, constant_derivative(gamma, a0));
  std::vector<double> nus;
  for (double lam : m.spectrum().lambdas) nus.push_back(lam + a0);
  const std::vector<double> expected = quadratic_real_parts(gamma, nus);

  const std::vector<double> exact = equilibrium_exponents(m, m.zero_state().u);
  REQUIRE(exact.size() == expected.size());
  for (std::size_t i = 0; i < exact.size(); ++i) CHECK(std::abs(exact[i] - expected[i]) < 1e-6);

  LyapunovOptions o;
  o.duration = 50;
  o.qr_interval = 0.25;
  const LyapunovReport qr = compute_exponents(m, m.zero_state(), o);
  for (std::size_t i = 0; i < qr.exponents.size(); ++i) CHECK(std::abs(qr.exponents[i] - expected[i]) < 0.03);
  o.duration = 1000;
  const LyapunovReport longer = compute_exponents(m, m.zero_state(), o);
  for (std::size_t i = 0; i < longer.exponents.size(); ++i) CHECK(std::abs(longer.exponents[i] - expected[i]) < 2e-3);
}

TEST_CASE("rotational equilibrium: top exponent is Re mu_+ of the first mode") {
  GalerkinModel m(Domain::interval(pi), 16, 2, rotational(0.1));
  const double oracle = growth_root(0.1, 1.0, 0.0, 1.0).real();
  const std::vector<double> exact = equilibrium_exponents(m, m.zero_state().u);
  CHECK(std::abs(exact[0] - oracle) < 1e-10);
  CHECK(std::abs(exact[1] - oracle) < 1e-10);
  LyapunovOptions o;
  o.tangents = 2;
  o.duration = 4000;
  const LyapunovReport longer = compute_exponents(m, m.zero_state(), o);
  CHECK(std::abs(longer.exponents[0] - oracle) < 1e-3);
  CHECK(std::abs(longer.exponents[1] - oracle) < 1e-3);
}

TEST_CASE("trace identity: all exponents sum to minus gamma M N") {
  const double gamma = 0.1;
  GalerkinModel m(Domain::interval(pi), 12, 2, rotational(gamma));
  const GalerkinState start = advance(m, m.random_state(3, 1.0), 50.0, m.max_step());
  LyapunovOptions o;
  o.duration = 20;
  const LyapunovReport r = compute_exponents(m, start, o);
  REQUIRE(r.exponents.size() == 48);
  CHECK(std::abs(r.cumulative.back() + gamma * 24) < 1e-6 * 24);
  const Eigen::MatrixXd g = generator_matrix(m, start.u, default_epsilon(gamma, 1.0));
  CHECK(g.trace() == doctest::Approx(-gamma * 24));
}

TEST_CASE("QR keeps tangents orthonormal in the energy product") {
  GalerkinModel m(Domain::interval(pi), 8, 2, rotational(0.1));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd t(32, 6);
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) t(i, j) = n(rng);
  }
  VariationalBundle b(m, m.random_state(1, 1.0), t, 0.025);
  for (int it = 0; it < 5; ++it) {
    for (int s = 0; s < 10; ++s) b.step(0.05);
    b.orthonormalize();
    const Eigen::MatrixXd q = b.tangents();
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Kaplan-Yorke dimension") {
  CHECK(ky_dimension(std::vector<double>{1.0, -2.0}) == doctest::Approx(1.5));
  CHECK(ky_dimension(std::vector<double>{-1.0, -2.0}) == 0.0);
  CHECK(ky_dimension(std::vector<double>{0.5, 0.4, -1.0}) == doctest::Approx(2.9));
  CHECK(ky_dimension(std::vector<double>{0.5, 0.1}) == 2.0);
  CHECK(ky_dimension(std::vector<double>{}) == 0.0);
}

TEST_CASE("property: KY is unchanged by appending more negative exponents") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(8);
    for (double& x : e) x = u(rng);
    std::sort(e.begin(), e.end(), std::greater<>());
    double total = 0.0;
    for (double x : e) total += x;
    if (total >= 0.0) continue;
    const double base = ky_dimension(e);
    std::vector<double> longer = e;
    longer.push_back(e.back() - 1.0);
    longer.push_back(e.back() - 3.0);
    CHECK(ky_dimension(longer) == doctest::Approx(base));
    CHECK(base >= 0.0);
    CHECK(base <= 8.0);
  }
}

TEST_CASE("n-traces") {
  GalerkinModel m(Domain::interval(pi), 10, 1, linear(0.2));
  CHECK(q_of_n(m, m.zero_state(), 0, 1.0, 0.0, 0.5, 0.05).empty());
  const double eps = 0.05;
  const std::vector<double> q = q_of_n(m, m.random_state(1, 1.0), 20, 2.0, 0.0, 0.5, eps);
  for (std::size_t n = 1; n <= q.size(); ++n) {
    CHECK(q[n - 1] <= -eps * static_cast<double>(n) / 2 + 1e-12);
    if (n > 1) CHECK(q[n - 1] / static_cast<double>(n) <= q[n - 2] / static_cast<double>(n - 1) + 1e-12);
  }
  CHECK_THROWS_AS(q_of_n(m, m.zero_state(), 21, 1.0, 0.0, 0.5, eps), InvalidInput);
}

TEST_CASE("q(n) majorizes the exponent sums") {
  const double gamma = 0.2;
  GalerkinModel m(Domain::interval(pi), 8, 2, rotational(gamma));
  const GalerkinState start = advance(m, m.random_state(2, 1.0), 20.0 / gamma, m.max_step());
  LyapunovOptions o;
  o.duration = 200.0 / gamma;
  o.q_every = 1;
  const LyapunovReport r = compute_exponents(m, start, o);
  REQUIRE(r.q_samples.size() == r.cumulative.size());
  for (std::size_t n = 0; n < r.cumulative.size(); ++n) {
    const double delta = 0.05 * std::abs(r.cumulative[n]) + 1e-3;
    CHECK(r.q_samples[n] >= r.cumulative[n] - delta);
  }
}

TEST_CASE("cubic case: q(n) is negative past the d = 1 root") {
  const double gamma = 0.1;
  NonlinearitySpec s;
  s.gamma = gamma;
  s.potential = Polynomial::separable_power(1, 0.25, 4);
  GalerkinModel m(Domain::interval(pi), 24, 1, s);
  const GalerkinState start = advance(m, m.random_state(1, 0.5), 20.0 / gamma, m.max_step());
  const Trajectory tr = simulate(m, start, 20.0, m.max_step(), 20, true);
  const double b1 = estimate_Bd(m, tr.states, 1);
  const double root = upper_bound_d1(gamma, 1, pi, b1).root;
  const std::vector<double> q = q_of_n(m, start, 48, 20.0, 0.0, 1.0, default_epsilon(gamma, 1.0));
  for (std::size_t n = 1; n <= q.size(); ++n) {
    if (static_cast<double>(n) > root) CHECK(q[n - 1] < 0.0);
    if (n > 1) CHECK(q[n - 1] / static_cast<double>(n) <= q[n - 2] / static_cast<double>(n - 1) + 1e-12);
  }
}

TEST_CASE("precondition checks") {
  GalerkinModel m(Domain::interval(pi), 4, 2, rotational(0.1));
  LyapunovOptions o;
  o.tangents = 17;
  CHECK_THROWS_AS(compute_exponents(m, m.zero_state(), o), InvalidInput);
  o.tangents = 2;
  o.qr_interval = 5.0;
  CHECK_THROWS_AS(compute_exponents(m, m.zero_state(), o), InvalidInput);
}
