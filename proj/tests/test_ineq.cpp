#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wavedim/error.hpp"
#include "wavedim/ineq.hpp"

using namespace wavedim;
using std::numbers::pi;

TEST_CASE("lemma on a diagonal operator") {
  const std::vector<double> mu{3.0, 2.0, 1.0};
  Eigen::MatrixXd fam = Eigen::MatrixXd::Zero(3, 2);
  fam(0, 0) = 1.0;
  fam(1, 1) = 1.0;
  LemmaCheck c = verify_sub_lemma(mu, fam);
  CHECK(c.lhs == doctest::Approx(5.0));
  CHECK(c.rhs == doctest::Approx(5.0));
  CHECK(c.pass);
  c = verify_sub_lemma(mu, 0.5 * fam);
  CHECK(c.lhs == doctest::Approx(1.25));
  CHECK(c.pass);
  Eigen::MatrixXd swapped = Eigen::MatrixXd::Zero(3, 2);
  swapped(2, 0) = 1.0;
  swapped(1, 1) = 1.0;
  CHECK(verify_sub_lemma(mu, swapped).lhs == doctest::Approx(3.0));
}

TEST_CASE("generated families are suborthonormal") {
  for (FamilyMode mode : {FamilyMode::Orthonormal, FamilyMode::Contracted, FamilyMode::Projected}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const SuborthFamily f = gen_suborth(Domain::interval(pi), 2, 7, 16, seed, mode);
      CHECK(f.size() == 7);
      CHECK(f.components() == 2);
      CHECK(f.suborthonormal());
      CHECK(f.gram_norm() <= 1.0 + 1e-10);
      if (mode == FamilyMode::Orthonormal) CHECK(f.gram.isIdentity(1e-10));
    }
  }
  const SuborthFamily c = gen_suborth(Domain::interval(1.0), 1, 5, 10, 3, FamilyMode::Contracted, 0.5);
  CHECK(c.gram_norm() == doctest::Approx(0.25));
}

TEST_CASE("families are deterministic in the seed") {
  const SuborthFamily a = gen_suborth(Domain::rectangle(1.0, 2.0), 1, 6, 20, 42, FamilyMode::Projected);
  const SuborthFamily b = gen_suborth(Domain::rectangle(1.0, 2.0), 1, 6, 20, 42, FamilyMode::Projected);
  const SuborthFamily c = gen_suborth(Domain::rectangle(1.0, 2.0), 1, 6, 20, 43, FamilyMode::Projected);
  CHECK(a.coeffs == b.coeffs);
  CHECK_FALSE(a.coeffs == c.coeffs);
}

TEST_CASE("property: components inherit suborthonormality") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const SuborthFamily f = gen_suborth(Domain::interval(2.0), 3, 9, 12, seed, FamilyMode::Orthonormal);
    double total = 0.0;
    for (int r = 0; r < 3; ++r) {
      const SuborthFamily part = component_family(f, r);
      CHECK(part.components() == 1);
      CHECK(part.suborthonormal());
      total += rho_l1_exact(part);
    }
    CHECK(total == doctest::Approx(rho_l1_exact(f)).epsilon(1e-12));
  }
}

TEST_CASE("grid and coefficient L1 norms agree") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SuborthFamily f1 = gen_suborth(Domain::interval(pi), 2, 5, 16, seed, FamilyMode::Contracted);
    CHECK(std::abs(evaluate_rho(f1, 63).l1 - rho_l1_exact(f1)) < 1e-8);
    const SuborthFamily f2 = gen_suborth(Domain::rectangle(1.0, 1.5), 1, 4, 12, seed, FamilyMode::Orthonormal);
    CHECK(std::abs(evaluate_rho(f2, 40).l1 - rho_l1_exact(f2)) < 1e-8);
  }
}

TEST_CASE("sharp embedding constant") {
  const EmbeddingCheck e = sharp_embedding_check(1.0, 1024, 50, 5);
  CHECK(e.bound == doctest::Approx(0.25));
  CHECK(e.hat_ratio == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(e.sine_ratio == doctest::Approx(2.0 / (pi * pi)).epsilon(1e-4));
  CHECK(e.max_random_ratio <= 0.25 * 1.02);
  CHECK(e.pass);
  const EmbeddingCheck l = sharp_embedding_check(pi);
  CHECK(l.hat_ratio >= 0.98 * pi / 4);
  CHECK(l.pass);
  CHECK_THROWS_AS(sharp_embedding_check(0.0), InvalidInput);
}

TEST_CASE("inverse square root sums") {
  const Domain line = Domain::interval(pi);
  const InvSqrtCheck a = sum_inv_sqrt(line, build_spectrum(line, 8), 3);
  CHECK(a.sum == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0));
  CHECK(a.bound == doctest::Approx(std::log(3.0 * std::numbers::e)));
  CHECK(a.pass);
  const InvSqrtCheck one = sum_inv_sqrt(line, build_spectrum(line, 8), 1);
  CHECK(one.sum == doctest::Approx(one.bound));
  CHECK(one.pass);
  const Domain square = Domain::rectangle(pi, pi);
  const InvSqrtCheck b = sum_inv_sqrt(square, build_spectrum(square, 8), 1);
  CHECK(b.sum == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(b.bound == doctest::Approx(2.0 * std::sqrt(pi / 2.0)));
  CHECK(b.pass);
}

TEST_CASE("rho bounds on eigenfunction families") {
  const SuborthFamily sq = eigenfunction_family(Domain::rectangle(pi, pi), 1);
  const RhoCheck c2 = rho_bound_d2(sq);
  CHECK(c2.value == doctest::Approx(0.5));
  CHECK(c2.bound == doctest::Approx(pi / 2));
  CHECK(c2.pass);
  CHECK(rho_bound_d3_value(1, 1, clr_constants(3)) == doctest::Approx(0.71355).epsilon(1e-4));
  CHECK(rho_bound_d3_value(1, 8, clr_constants(3)) == doctest::Approx(2 * 0.71355).epsilon(1e-4));
  const SuborthFamily line = eigenfunction_family(Domain::interval(pi), 40);
  const RhoCheck c1 = rho_bound_d1(line);
  CHECK(c1.bound == doctest::Approx(pi / 4));
  CHECK(c1.pass);
  CHECK(eigenfunction_family(Domain::interval(1.0), 5).gram.isIdentity(1e-12));
}

TEST_CASE("3D rho scaling") {
  const std::vector<std::size_t> sizes{8, 16, 32, 64};
  const RhoScaling s = rho_scaling_d3(Domain::box({pi, pi, pi}), sizes);
  CHECK(s.fit.slope == doctest::Approx(0.435).epsilon(0.01));
  CHECK(std::abs(s.fit.slope - 1.0 / 3.0) <= 0.1 + 0.01);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    CHECK(s.norms[i] <= rho_bound_d3_value(1, sizes[i], clr_constants(3)));
  }
}

TEST_CASE("small campaigns pass and are reproducible") {
  for (CampaignKind kind : {CampaignKind::SubLemma, CampaignKind::RhoD1, CampaignKind::RhoD2, CampaignKind::InvSqrt}) {
    CampaignOptions opt;
    opt.kind = kind;
    opt.families = 40;
    opt.n_max = 24;
    opt.seed = 11;
    const CampaignSummary a = run_campaign(opt);
    CHECK(a.passed == a.families);
    CHECK(a.min_margin >= -1e-10);
    CHECK(a.rows.size() == 40);
    opt.threads = 3;
    const CampaignSummary b = run_campaign(opt);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].seed == b.rows[i].seed);
      CHECK(a.rows[i].lhs == b.rows[i].lhs);
    }
  }
  CampaignOptions d3;
  d3.kind = CampaignKind::RhoD3;
  d3.families = 6;
  d3.n_max = 6;
  d3.grid = 24;
  CHECK(run_campaign(d3).passed == 6);
  CHECK(parse_campaign_kind(campaign_name(CampaignKind::RhoD2)) == CampaignKind::RhoD2);
  CHECK_THROWS_AS(parse_campaign_kind("nope"), InvalidInput);
}
