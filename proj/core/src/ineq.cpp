#include "wavedim/ineq.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "wavedim/collocation.hpp"
#include "wavedim/error.hpp"

namespace wavedim {

namespace {

Eigen::VectorXd bold_weights(const Spectrum& spectrum) {
  const auto m = static_cast<Eigen::Index>(spectrum.modes());
  const int n = spectrum.components;
  Eigen::VectorXd w(m * n);
  for (int r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < m; ++k) w(r * m + k) = spectrum.lambdas[static_cast<std::size_t>(k)];
  }
  return w;
}

double largest_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

/// Orthonormal columns spanning a random n-dimensional subspace of R^dim.
Eigen::MatrixXd random_orthonormal(Eigen::Index dim, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = normal(rng);
    z.col(j).normalize();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(r(j, j)) < 1e-12) throw NumericFailure("rank-deficient draw: near-zero Gram-Schmidt pivot");
  }
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Euclidean suborthonormal family of the requested kind.
Eigen::MatrixXd random_suborth(Eigen::Index dim, Eigen::Index n, FamilyMode mode, double contraction,
                               std::mt19937_64& rng) {
  Eigen::MatrixXd q = random_orthonormal(dim, n, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (mode) {
    case FamilyMode::Orthonormal:
      break;
    case FamilyMode::Contracted:
      for (Eigen::Index j = 0; j < n; ++j) q.col(j) *= contraction > 0.0 ? contraction : 1.0 - unit(rng);
      break;
    case FamilyMode::Projected: {
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (unit(rng) < 0.5) q.row(i).setZero();
      }
      const double top = largest_eigenvalue(q.transpose() * q);
      if (top > 0.0) {
        const Eigen::MatrixXd scaled = q / std::sqrt(top);
        if (largest_eigenvalue(scaled.transpose() * scaled) <= 1.0 + 1e-12) q = scaled;
      }
      break;
    }
  }
  return q;
}

}  // namespace

double SuborthFamily::gram_norm() const { return largest_eigenvalue(gram); }

bool SuborthFamily::suborthonormal(double tol) const { return gram_norm() <= 1.0 + tol; }

Eigen::MatrixXd gradient_gram(const Spectrum& spectrum, const Eigen::MatrixXd& coeffs) {
  const Eigen::VectorXd w = bold_weights(spectrum);
  if (coeffs.rows() != w.size()) throw InvalidInput("coefficient rows do not match M N");
  return coeffs.transpose() * w.asDiagonal() * coeffs;
}

SuborthFamily gen_suborth(const Domain& domain, int components, std::size_t n, std::size_t modes, std::uint64_t seed,
                          FamilyMode mode, double contraction) {
  if (n > modes * static_cast<std::size_t>(components)) {
    throw InvalidInput("family size " + std::to_string(n) + " exceeds M N");
  }
  if (contraction < 0.0 || contraction > 1.0) throw InvalidInput("contraction factor must lie in (0, 1]");
  SuborthFamily f;
  f.domain = domain;
  f.spectrum = build_spectrum(domain, modes, components);
  std::mt19937_64 rng(seed);
  const Eigen::VectorXd w = bold_weights(f.spectrum);
  const Eigen::MatrixXd q =
      random_suborth(w.size(), static_cast<Eigen::Index>(n), mode, contraction, rng);
  f.coeffs = w.cwiseSqrt().cwiseInverse().asDiagonal() * q;
  f.gram = gradient_gram(f.spectrum, f.coeffs);
  return f;
}

SuborthFamily eigenfunction_family(const Domain& domain, std::size_t n) {
  SuborthFamily f;
  f.domain = domain;
  f.spectrum = build_spectrum(domain, std::max<std::size_t>(n, 1), 1);
  const auto m = static_cast<Eigen::Index>(f.spectrum.modes());
  f.coeffs = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    f.coeffs(j, j) = 1.0 / std::sqrt(f.spectrum.lambdas[static_cast<std::size_t>(j)]);
  }
  f.gram = gradient_gram(f.spectrum, f.coeffs);
  return f;
}

SuborthFamily component_family(const SuborthFamily& family, int r) {
  if (r < 0 || r >= family.components()) throw InvalidInput("component index out of range");
  SuborthFamily f;
  f.domain = family.domain;
  f.spectrum = build_spectrum(family.domain, family.spectrum.modes(), 1);
  const auto m = static_cast<Eigen::Index>(family.spectrum.modes());
  f.coeffs = family.coeffs.middleRows(r * m, m);
  f.gram = gradient_gram(f.spectrum, f.coeffs);
  return f;
}

LemmaCheck verify_sub_lemma(std::span<const double> mu, const Eigen::MatrixXd& family) {
  if (static_cast<std::size_t>(family.rows()) != mu.size()) throw InvalidInput("operator and family sizes differ");
  if (static_cast<std::size_t>(family.cols()) > mu.size()) throw InvalidInput("family larger than the space");
  LemmaCheck c;
  for (Eigen::Index i = 0; i < family.cols(); ++i) {
    for (Eigen::Index k = 0; k < family.rows(); ++k) c.lhs += mu[static_cast<std::size_t>(k)] * family(k, i) * family(k, i);
    c.rhs += mu[static_cast<std::size_t>(i)];
  }
  c.pass = c.lhs <= c.rhs + 1e-10;
  return c;
}

RhoField evaluate_rho(const SuborthFamily& family, int points_per_axis) {
  const int d = family.dim();
  if (points_per_axis < 1) throw InvalidInput("rho grid needs at least one point per axis");
  RhoField out;
  for (int a = 0; a < d; ++a) out.points[static_cast<std::size_t>(a)] = points_per_axis;
  Collocation grid(family.domain, family.spectrum, out.points);
  const auto m = static_cast<Eigen::Index>(family.spectrum.modes());
  const Eigen::Index n = family.coeffs.cols();
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.points()));
  Eigen::MatrixXd values;
  constexpr Eigen::Index chunk = 64;
  for (int r = 0; r < family.components(); ++r) {
    for (Eigen::Index start = 0; start < n; start += chunk) {
      const Eigen::Index cols = std::min(chunk, n - start);
      grid.synthesize(family.coeffs.block(r * m, start, m, cols), values);
      rho += values.rowwise().squaredNorm();
    }
  }
  out.values.assign(rho.data(), rho.data() + rho.size());
  out.linf = rho.size() > 0 ? rho.maxCoeff() : 0.0;
  out.l1 = grid.cell_volume() * rho.sum();
  if (d >= 3) {
    const double p = static_cast<double>(d) / (d - 2.0);
    out.lp = std::pow(grid.cell_volume() * rho.array().pow(p).sum(), 1.0 / p);
  }
  return out;
}

double rho_l1_exact(const SuborthFamily& family) { return family.coeffs.squaredNorm(); }

RhoCheck rho_bound_d1(const SuborthFamily& family, int cells, double grid_tol) {
  if (family.dim() != 1) throw InvalidInput("rho_bound_d1 needs an interval");
  RhoCheck c;
  c.bound = family.components() * family.domain.length(0) / 4.0;
  c.value = family.size() == 0 ? 0.0 : evaluate_rho(family, cells - 1).linf;
  c.pass = c.value <= c.bound * (1.0 + grid_tol);
  return c;
}

RhoCheck rho_bound_d2(const SuborthFamily& family) {
  if (family.dim() != 2) throw InvalidInput("rho_bound_d2 needs a rectangle");
  RhoCheck c;
  const auto n = static_cast<double>(family.size());
  c.value = rho_l1_exact(family);
  c.bound = n == 0.0 ? 0.0
                     : family.components() * family.domain.measure() / (2.0 * std::numbers::pi) * (1.0 + std::log(n));
  c.pass = c.value <= c.bound * (1.0 + 1e-8);
  return c;
}

double rho_bound_d3_value(int components, std::size_t n, const ClrConstants& clr) {
  return std::pow(components * clr.value, 2.0 / 3.0) * 3.0 * std::cbrt(static_cast<double>(n));
}

RhoCheck rho_bound_d3(const SuborthFamily& family, const ClrConstants& clr, int points_per_axis) {
  if (family.dim() != 3) throw InvalidInput("rho_bound_d3 needs a 3-box");
  if (clr.d != 3) throw InvalidInput("rho_bound_d3 needs the d = 3 CLR constant");
  RhoCheck c;
  c.bound = rho_bound_d3_value(family.components(), family.size(), clr);
  c.value = family.size() == 0 ? 0.0 : evaluate_rho(family, points_per_axis).lp;
  c.pass = c.value <= c.bound * 1.05;
  return c;
}

RhoScaling rho_scaling_d3(const Domain& box, std::span<const std::size_t> sizes, int points_per_axis) {
  if (box.dim() != 3) throw InvalidInput("rho scaling needs a 3-box");
  RhoScaling out;
  std::vector<double> xs;
  for (std::size_t n : sizes) {
    out.sizes.push_back(n);
    out.norms.push_back(evaluate_rho(eigenfunction_family(box, n), points_per_axis).lp);
    xs.push_back(static_cast<double>(n));
  }
  out.fit = fit_loglog(xs, out.norms);
  return out;
}

InvSqrtCheck sum_inv_sqrt(const Domain& domain, const Spectrum& spectrum, std::size_t n) {
  if (n > spectrum.vector_modes()) {
    throw InvalidInput("spectrum has " + std::to_string(spectrum.vector_modes()) + " vector modes, need " +
                       std::to_string(n));
  }
  InvSqrtCheck c;
  for (std::size_t j = 0; j < n; ++j) c.sum += 1.0 / std::sqrt(spectrum.bold_lambdas[j]);
  const double nn = static_cast<double>(n);
  const int comps = spectrum.components;
  if (domain.dim() == 1) {
    c.bound = n == 0 ? 0.0 : comps * domain.length(0) / std::numbers::pi * (1.0 + std::log(nn));
  } else if (domain.dim() == 2) {
    c.bound = std::sqrt(comps * domain.measure() / (2.0 * std::numbers::pi)) * 2.0 * std::sqrt(nn);
  } else {
    throw InvalidInput("sum_inv_sqrt bounds exist for d = 1 and d = 2 only");
  }
  c.pass = c.sum <= c.bound * (1.0 + 1e-12);
  return c;
}

namespace {

double grid_ratio(const std::vector<double>& u, double h) {
  double top = 0.0;
  double grad = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    top = std::max(top, u[i] * u[i]);
    if (i + 1 < u.size()) grad += (u[i + 1] - u[i]) * (u[i + 1] - u[i]) / h;
  }
  return grad > 0.0 ? top / grad : 0.0;
}

}  // namespace

EmbeddingCheck sharp_embedding_check(double length, int cells, std::size_t samples, std::uint64_t seed,
                                     double grid_tol) {
  if (!(length > 0.0) || cells < 2) throw InvalidInput("embedding check needs length > 0 and at least 2 cells");
  const double h = length / cells;
  const auto pts = static_cast<std::size_t>(cells) + 1;
  std::vector<double> u(pts);
  EmbeddingCheck c;
  c.bound = length / 4.0;
  for (std::size_t i = 0; i < pts; ++i) {
    const double x = static_cast<double>(i) * h;
    u[i] = std::min(x, length - x);
  }
  c.hat_ratio = grid_ratio(u, h);
  for (std::size_t i = 0; i < pts; ++i) u[i] = std::sin(std::numbers::pi * static_cast<double>(i) * h / length);
  u.back() = 0.0;
  c.sine_ratio = grid_ratio(u, h);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> terms(1, 32);
  for (std::size_t s = 0; s < samples; ++s) {
    const int k = terms(rng);
    std::vector<double> a(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) a[static_cast<std::size_t>(m)] = normal(rng) / (m + 1.0);
    for (std::size_t i = 0; i < pts; ++i) {
      double v = 0.0;
      for (int m = 0; m < k; ++m) {
        v += a[static_cast<std::size_t>(m)] * std::sin((m + 1.0) * std::numbers::pi * static_cast<double>(i) * h / length);
      }
      u[i] = v;
    }
    u.front() = 0.0;
    u.back() = 0.0;
    c.max_random_ratio = std::max(c.max_random_ratio, grid_ratio(u, h));
  }
  c.pass = c.max_random_ratio <= c.bound * (1.0 + grid_tol) && c.sine_ratio <= c.bound * (1.0 + grid_tol) &&
           c.hat_ratio >= 0.98 * c.bound;
  return c;
}

CampaignKind parse_campaign_kind(const std::string& name) {
  if (name == "sub-lemma") return CampaignKind::SubLemma;
  if (name == "rho-d1") return CampaignKind::RhoD1;
  if (name == "rho-d2") return CampaignKind::RhoD2;
  if (name == "rho-d3") return CampaignKind::RhoD3;
  if (name == "inv-sqrt") return CampaignKind::InvSqrt;
  throw InvalidInput("unknown campaign '" + name + "' (sub-lemma, rho-d1, rho-d2, rho-d3, inv-sqrt)");
}

std::string campaign_name(CampaignKind kind) {
  switch (kind) {
    case CampaignKind::SubLemma: return "sub-lemma";
    case CampaignKind::RhoD1: return "rho-d1";
    case CampaignKind::RhoD2: return "rho-d2";
    case CampaignKind::RhoD3: return "rho-d3";
    case CampaignKind::InvSqrt: return "inv-sqrt";
  }
  return "unknown";
}

namespace {

FamilyMode mode_for(std::uint64_t index) {
  const std::uint64_t slot = index % 10;
  if (slot < 7) return FamilyMode::Orthonormal;
  if (slot < 9) return FamilyMode::Contracted;
  return FamilyMode::Projected;
}

CampaignRow run_one(const CampaignOptions& opt, std::uint64_t index) {
  const std::uint64_t seed = opt.seed + index;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const FamilyMode mode = mode_for(index);
  const double pi = std::numbers::pi;
  CampaignRow row;
  row.seed = seed;
  auto draw_n = [&](std::size_t cap) {
    std::uniform_int_distribution<std::size_t> pick(1, std::max<std::size_t>(1, std::min(opt.n_max, cap)));
    return pick(rng);
  };
  switch (opt.kind) {
    case CampaignKind::SubLemma: {
      std::uniform_int_distribution<std::size_t> dims(1, std::max<std::size_t>(1, opt.n_max));
      const std::size_t dim = dims(rng);
      const std::size_t n = draw_n(dim);
      std::vector<double> mu(dim);
      for (std::size_t j = 0; j < dim; ++j) mu[j] = 1.0 / static_cast<double>(j + 1);
      const Eigen::MatrixXd fam =
          random_suborth(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n), mode, 0.0, rng);
      const LemmaCheck c = verify_sub_lemma(mu, fam);
      row.n = n;
      row.lhs = c.lhs;
      row.rhs = c.rhs;
      row.pass = c.pass;
      break;
    }
    case CampaignKind::RhoD1: {
      const int comps = index % 2 == 0 ? 1 : 2;
      const std::size_t n = draw_n(64);
      const SuborthFamily f = gen_suborth(Domain::interval(pi), comps, n, 64, seed, mode);
      const RhoCheck c = rho_bound_d1(f, opt.grid > 0 ? opt.grid : 1024);
      row.n = n;
      row.lhs = c.value;
      row.rhs = c.bound;
      row.pass = c.pass && f.suborthonormal();
      break;
    }
    case CampaignKind::RhoD2: {
      const int comps = index % 2 == 0 ? 1 : 2;
      const std::size_t n = draw_n(64);
      const SuborthFamily f = gen_suborth(Domain::rectangle(pi, pi), comps, n, 64, seed, mode);
      const RhoCheck c = rho_bound_d2(f);
      row.n = n;
      row.lhs = c.value;
      row.rhs = c.bound;
      row.pass = c.pass && f.suborthonormal();
      break;
    }
    case CampaignKind::RhoD3: {
      const std::size_t n = draw_n(16);
      const SuborthFamily f = gen_suborth(Domain::box({pi, pi, pi}), 1, n, 32, seed, mode);
      const RhoCheck c = rho_bound_d3(f, clr_constants(3), opt.grid > 0 ? opt.grid : 32);
      row.n = n;
      row.lhs = c.value;
      row.rhs = c.bound;
      row.pass = c.pass && f.suborthonormal();
      break;
    }
    case CampaignKind::InvSqrt: {
      const int comps = 1 + static_cast<int>(index % 3);
      const Domain dom = (index / 3) % 2 == 0 ? Domain::interval(pi * (0.5 + (index % 7) / 4.0))
                                              : Domain::rectangle(pi, pi * (0.5 + (index % 5) / 4.0));
      const std::size_t n = draw_n(1024);
      const Spectrum s = build_spectrum(dom, (n + static_cast<std::size_t>(comps) - 1) / static_cast<std::size_t>(comps), comps);
      const InvSqrtCheck c = sum_inv_sqrt(dom, s, n);
      row.n = n;
      row.lhs = c.sum;
      row.rhs = c.bound;
      row.pass = c.pass;
      break;
    }
  }
  row.margin = row.rhs - row.lhs;
  return row;
}

}  // namespace

CampaignSummary run_campaign(const CampaignOptions& options) {
  CampaignSummary out;
  out.kind = campaign_name(options.kind);
  out.families = options.families;
  out.rows.resize(options.families);
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.families)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= options.families) return;
      try {
        out.rows[i] = run_one(options, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = options.families;
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.min_margin = out.rows.empty() ? 0.0 : out.rows.front().margin;
  for (const CampaignRow& r : out.rows) {
    out.passed += r.pass;
    out.min_margin = std::min(out.min_margin, r.margin);
    if (r.rhs > 0.0) out.max_ratio = std::max(out.max_ratio, r.lhs / r.rhs);
  }
  return out;
}

}  // namespace wavedim
