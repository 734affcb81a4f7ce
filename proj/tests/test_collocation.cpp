#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "doctest.h"
#include "wavedim/collocation.hpp"
#include "wavedim/error.hpp"

using namespace wavedim;
using std::numbers::pi;

namespace {

Eigen::MatrixXd random_coeffs(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd c(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) c(i, j) = n(rng);
  }
  return c;
}

}  // namespace

TEST_CASE("synthesis evaluates the normalized sine basis") {
  const Domain d = Domain::interval(2.0);
  const Spectrum s = build_spectrum(d, 4);
  Collocation grid(d, s, {9, 1, 1});
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 1);
  c(2, 0) = 1.0;
  Eigen::MatrixXd values;
  grid.synthesize(c, values);
  REQUIRE(values.rows() == 9);
  for (std::size_t p = 0; p < 9; ++p) {
    const double x = grid.coordinate(p, 0);
    CHECK(x == doctest::Approx(2.0 * static_cast<double>(p + 1) / 10.0));
    CHECK(values(static_cast<Eigen::Index>(p), 0) == doctest::Approx(std::sqrt(2.0 / 2.0) * std::sin(3 * pi * x / 2.0)));
  }
  CHECK(grid.cell_volume() == doctest::Approx(0.2));
  CHECK(grid.boundary_weight() == doctest::Approx(2.0 - 9 * 0.2));
}

TEST_CASE("property: analysis inverts synthesis in 1, 2 and 3 dimensions") {
  const std::vector<Domain> domains{Domain::interval(pi), Domain::rectangle(1.0, 2.5), Domain::box({1.0, 1.5, 0.8})};
  unsigned seed = 1;
  for (const Domain& d : domains) {
    const Spectrum s = build_spectrum(d, 20);
    Collocation grid(d, s, Collocation::dealiased_points(s, d.dim(), 2));
    const Eigen::MatrixXd c = random_coeffs(20, 3, seed++);
    Eigen::MatrixXd values;
    Eigen::MatrixXd back;
    grid.synthesize(c, values);
    grid.analyze(values, back);
    CHECK((back - c).cwiseAbs().maxCoeff() < 1e-12);
    // Parseval: the grid L2 norm equals the coefficient norm.
    const double l2 = grid.cell_volume() * values.col(0).squaredNorm();
    CHECK(l2 == doctest::Approx(c.col(0).squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("dealiasing grid rule") {
  const Spectrum s = build_spectrum(Domain::interval(pi), 16);
  CHECK(Collocation::dealiased_points(s, 1, 2)[0] == 25);
  CHECK(Collocation::dealiased_points(s, 1, 4)[0] == 41);
  CHECK(Collocation::dealiased_points(s, 1, 0)[0] == 25);
}

TEST_CASE("cubic products are exact on the dealiased grid") {
  const Domain d = Domain::interval(pi);
  const Spectrum s = build_spectrum(d, 8);
  Collocation grid(d, s, Collocation::dealiased_points(s, 1, 3));
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(8, 1);
  c(0, 0) = std::sqrt(pi / 2.0);  // u = sin x
  Eigen::MatrixXd values;
  grid.synthesize(c, values);
  values = values.array().cube().matrix();
  Eigen::MatrixXd out;
  grid.analyze(values, out);
  CHECK(out(0, 0) == doctest::Approx(0.75 * std::sqrt(pi / 2.0)));
  CHECK(out(2, 0) == doctest::Approx(-0.25 * std::sqrt(pi / 2.0)));
  CHECK(std::abs(out(1, 0)) < 1e-13);
  CHECK(std::abs(out(5, 0)) < 1e-13);
}

TEST_CASE("modes beyond the grid are rejected") {
  const Domain d = Domain::interval(pi);
  const Spectrum s = build_spectrum(d, 10);
  CHECK_THROWS_AS(Collocation(d, s, {5, 1, 1}), InvalidInput);
}
