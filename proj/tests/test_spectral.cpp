#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wavedim/error.hpp"
#include "wavedim/spectral.hpp"

using namespace wavedim;
using std::numbers::pi;

TEST_CASE("interval eigenvalues are n^2 on (0, pi)") {
  const Spectrum s = build_spectrum(Domain::interval(pi), 3);
  REQUIRE(s.modes() == 3);
  CHECK(s.lambdas[0] == doctest::Approx(1.0));
  CHECK(s.lambdas[1] == doctest::Approx(4.0));
  CHECK(s.lambdas[2] == doctest::Approx(9.0));
}

TEST_CASE("square eigenvalues 2, 5, 5 with lexicographic ties") {
  const Spectrum s = build_spectrum(Domain::rectangle(pi, pi), 3);
  CHECK(s.lambdas[0] == doctest::Approx(2.0));
  CHECK(s.lambdas[1] == doctest::Approx(5.0));
  CHECK(s.lambdas[2] == doctest::Approx(5.0));
  CHECK(s.indices[1][0] == 1);
  CHECK(s.indices[1][1] == 2);
  CHECK(s.indices[2][0] == 2);
}

TEST_CASE("vector copies repeat each eigenvalue N times") {
  const Spectrum s = build_spectrum(Domain::interval(pi), 2, 2);
  REQUIRE(s.bold_lambdas.size() == 4);
  CHECK(s.bold_lambdas[0] == doctest::Approx(1.0));
  CHECK(s.bold_lambdas[1] == doctest::Approx(1.0));
  CHECK(s.bold_lambdas[2] == doctest::Approx(4.0));
  CHECK(s.bold_lambdas[3] == doctest::Approx(4.0));
}

TEST_CASE("invalid spectra are rejected") {
  CHECK_THROWS_AS(build_spectrum(Domain::interval(pi), 0), InvalidInput);
  CHECK_THROWS_AS(build_spectrum(Domain::interval(pi), 3, 0), InvalidInput);
  CHECK_THROWS_AS(Domain::interval(-1.0), InvalidInput);
  CHECK_THROWS_AS(Domain::rectangle(1.0, 0.0), InvalidInput);
}

TEST_CASE("Weyl term") {
  CHECK(weyl_estimate(Domain::interval(pi), 10) == doctest::Approx(100.0));
  CHECK(weyl_estimate(Domain::interval(pi), 1) == doctest::Approx(1.0));
  CHECK(weyl_estimate(Domain::rectangle(pi, pi), 100) == doctest::Approx(400.0 / pi).epsilon(1e-10));
}

TEST_CASE("Li-Yau bounds") {
  const LiYauBound a = li_yau_lower(Domain::rectangle(pi, pi), 1, 1);
  CHECK(a.cumulative == doctest::Approx(2.0 / pi));
  CHECK(build_spectrum(Domain::rectangle(pi, pi), 1).lambdas[0] >= a.cumulative);
  CHECK(li_yau_lower(Domain::rectangle(2.0, pi), 1, 1).cumulative == doctest::Approx(1.0));
  CHECK(li_yau_lower(Domain::rectangle(pi, pi), 4, 2).cumulative == doctest::Approx(16.0 / pi));
  CHECK_THROWS_AS(li_yau_lower(Domain::interval(pi), 1, 1), InvalidInput);
}

TEST_CASE("property: spectra are non-decreasing and exact in 1D") {
  for (double l : {0.5, 1.0, pi, 7.3}) {
    const Spectrum s = build_spectrum(Domain::interval(l), 200, 3);
    for (std::size_t n = 0; n < s.modes(); ++n) {
      const double exact = std::pow(pi / l * static_cast<double>(n + 1), 2);
      CHECK(std::abs(s.lambdas[n] - exact) <= 1e-12 * exact);
      CHECK(std::abs(weyl_estimate(Domain::interval(l), n + 1) - exact) <= 1e-12 * exact);
    }
    for (std::size_t j = 1; j < s.bold_lambdas.size(); ++j) CHECK(s.bold_lambdas[j - 1] <= s.bold_lambdas[j]);
    for (std::size_t k = 0; k < s.modes(); ++k) {
      for (int r = 0; r < 3; ++r) CHECK(s.bold_lambdas[k * 3 + static_cast<std::size_t>(r)] == s.lambdas[k]);
    }
  }
}

TEST_CASE("property: Li-Yau holds on rectangles for every n") {
  for (auto [lx, ly] : {std::pair{pi, pi}, std::pair{1.0, 3.0}, std::pair{2.5, 0.7}}) {
    for (int n_comp : {1, 2, 3}) {
      const Domain d = Domain::rectangle(lx, ly);
      const Spectrum s = build_spectrum(d, 150, n_comp);
      double sum = 0.0;
      for (std::size_t n = 1; n <= s.vector_modes(); ++n) {
        sum += s.bold_lambdas[n - 1];
        CHECK(sum >= li_yau_lower(d, n, n_comp).cumulative * (1.0 - 1e-12));
      }
      for (std::size_t j = 1; j < s.modes(); ++j) CHECK(s.lambdas[j - 1] <= s.lambdas[j]);
    }
  }
}

TEST_CASE("box spectrum in three dimensions") {
  const Spectrum s = build_spectrum(Domain::box({pi, pi, pi}), 4);
  CHECK(s.lambdas[0] == doctest::Approx(3.0));
  CHECK(s.lambdas[1] == doctest::Approx(6.0));
  CHECK(s.lambdas[3] == doctest::Approx(6.0));
  CHECK(Domain::box({1.0, 2.0, 3.0}).measure() == doctest::Approx(6.0));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0));
}
