#include "wavedim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <thread>

#include "wavedim/bounds.hpp"
#include "wavedim/dynamics.hpp"
#include "wavedim/error.hpp"
#include "wavedim/lyapunov.hpp"
#include "wavedim/report.hpp"

#ifndef WAVEDIM_VERSION
#define WAVEDIM_VERSION "0.0.0"
#endif

namespace wavedim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

UnstableModes complete_count(double gamma, double b, const Domain& domain, std::size_t start) {
  std::size_t modes = std::max<std::size_t>(start, 64);
  for (;;) {
    UnstableModes u = unstable_mode_count(gamma, 0.0, b, build_spectrum(domain, modes));
    if (u.complete) return u;
    if (modes > (std::size_t{1} << 22)) throw NumericFailure("unstable band exceeds the enumeration limit");
    modes *= 2;
  }
}

bool zero_is_stationary(GalerkinModel& model) {
  if (model.has_forcing()) return false;
  Eigen::MatrixXd f;
  model.eval_nonlinearity(model.zero_state().u, f);
  return f.size() == 0 || f.cwiseAbs().maxCoeff() < 1e-14;
}

double positive_count(const std::vector<double>& exponents) {
  return static_cast<double>(std::count_if(exponents.begin(), exponents.end(), [](double x) { return x > 1e-12; }));
}

}  // namespace

std::size_t RunRecord::failures() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const GammaResult& r) { return !r.ok; }));
}

std::string code_version() { return WAVEDIM_VERSION; }

GammaResult run_gamma(const RunConfig& config, double gamma) {
  GammaResult r;
  r.gamma = gamma;
  r.bound_d1 = r.bound_d1_majorant = r.bound_d1_simple = r.bound_d2 = r.bound_d3plus = kNaN;
  r.equilibrium_ky = r.equilibrium_dim = kNaN;
  try {
    const Domain domain = make_domain(config);
    const int d = domain.dim();
    const int n_comp = config.components;
    const double b = config.rotation_strength;

    std::size_t modes = config.modes;
    if (config.rotational && b != 0.0) {
      const UnstableModes u = complete_count(gamma, b, domain, config.modes);
      r.unstable_count = u.count;
      r.instability_index = u.instability_index;
      r.count_complete = u.complete;
      if (config.sweep.auto_modes) modes = std::max(modes, 4 * u.count + 4);
    }
    r.modes = modes;

    GalerkinModel model(domain, modes, n_comp, make_spec(config, gamma, modes));
    r.dt = config.dt > 0.0 ? std::min(config.dt, model.max_step()) : model.max_step();
    r.burn_in = config.sweep.burn_in_factor / gamma;

    const std::size_t dim = 2 * modes * static_cast<std::size_t>(n_comp);
    r.dimension = dim;
    std::size_t k = config.sweep.tangents;
    if (k == 0) k = std::min(dim, 2 * r.instability_index + 16);
    k = std::min(k, dim);
    r.tangents = k;

    LyapunovOptions opt;
    opt.tangents = k;
    opt.duration = config.sweep.duration;
    opt.dt = r.dt;
    opt.qr_interval = config.lyapunov.qr_interval;
    opt.epsilon = config.lyapunov.epsilon;
    opt.q_every = config.sweep.q_every;
    opt.seed = config.seed;

    const GalerkinState start = advance(model, model.random_state(config.seed, config.amplitude), r.burn_in, r.dt);
    opt.qr_interval = std::min(opt.qr_interval, 1.0 / growth_rate_estimate(model, start.u));
    r.qr_interval = opt.qr_interval;

    const std::size_t samples = config.sweep.bd_samples;
    const double window = config.sweep.duration;
    const auto steps = static_cast<std::size_t>(std::ceil(window / r.dt - 1e-9));
    const std::size_t stride = std::max<std::size_t>(1, steps / samples);
    const Trajectory tr = simulate(model, start, window, r.dt, stride, true);
    r.bd = estimate_Bd(model, tr.states, d);

    LyapunovReport rep = compute_exponents(model, start, opt);
    r.trajectory_ky = rep.ky_dimension;
    r.ky_dimension = rep.ky_dimension;
    r.ky_source = "trajectory";
    r.truncated = rep.truncated;
    r.converged = rep.converged;
    r.drift = rep.drift;
    r.q_curve = rep.q_samples;
    r.exponent_sum = rep.cumulative.empty() ? 0.0 : rep.cumulative.back();
    r.top_exponents.assign(rep.exponents.begin(),
                           rep.exponents.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(8, k)));

    for (std::size_t restart = 1; restart <= config.sweep.restarts; ++restart) {
      const std::uint64_t seed = config.seed + 1000 * restart;
      const GalerkinState s = advance(model, model.random_state(seed, config.amplitude), r.burn_in, r.dt);
      LyapunovOptions o = opt;
      o.qr_interval = std::min(opt.qr_interval, 1.0 / growth_rate_estimate(model, s.u));
      o.seed = seed;
      o.q_every = 0;
      const LyapunovReport other = compute_exponents(model, s, o);
      if (other.ky_dimension > r.ky_dimension) {
        r.ky_dimension = other.ky_dimension;
        r.ky_source = "restart-" + std::to_string(restart);
        r.truncated = other.truncated;
      }
    }

    const bool stationary = zero_is_stationary(model);
    if (config.sweep.equilibrium && stationary && model.has_nonlinearity()) {
      const std::vector<double> eq = equilibrium_exponents(model, model.zero_state().u);
      r.equilibrium_ky = ky_dimension(eq);
      if (!config.rotational) r.instability_index = static_cast<std::size_t>(positive_count(eq));
      if (r.equilibrium_ky > r.ky_dimension) {
        r.ky_dimension = r.equilibrium_ky;
        r.ky_source = "equilibrium";
        r.truncated = false;
      }
    }

    if (d == 1) {
      const double length = domain.length(0);
      if (r.bd > 0.0) {
        const BoundReport br = upper_bound_d1(gamma, n_comp, length, r.bd);
        r.bound_d1 = br.root;
        r.bound_d1_majorant = br.majorant;
      } else {
        r.bound_d1 = r.bound_d1_majorant = 0.0;
      }
      r.bound_d1_simple = upper_bound_d1_simple(gamma, n_comp, length, r.bd);
      r.upper = r.bound_d1;
      if (config.rotational && b > 0.0) r.equilibrium_dim = equilibrium_lyapunov_dim(gamma, b, length);
    } else if (d == 2) {
      r.bound_d2 = upper_bound_d2(gamma, n_comp, domain.measure(), r.bd);
      r.upper = r.bound_d2;
    } else {
      r.bound_d3plus = upper_bound_d3plus(gamma, n_comp, d, r.bd, clr_constants(3));
      r.upper = r.bound_d3plus;
    }

    r.lower_ok = static_cast<double>(r.instability_index) <= r.ky_dimension + 0.5;
    r.upper_ok = r.truncated ? static_cast<double>(dim) <= r.upper : r.ky_dimension <= r.upper + 1e-9;
    r.ok = true;
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

SweepFits fit_record(const std::vector<GammaResult>& results) {
  SweepFits f;
  std::vector<double> g;
  std::vector<double> counts;
  std::vector<double> ky;
  std::vector<double> upper;
  std::vector<double> eqd;
  for (const GammaResult& r : results) {
    if (!r.ok) continue;
    g.push_back(r.gamma);
    counts.push_back(static_cast<double>(r.unstable_count));
    ky.push_back(r.ky_dimension);
    upper.push_back(r.upper);
    eqd.push_back(r.equilibrium_dim);
  }
  auto attempt = [&](const std::vector<double>& y, ScalingFit& out, bool& valid) {
    valid = false;
    if (g.size() < 4) return;
    for (double v : y) {
      if (!(v > 0.0) || !std::isfinite(v)) return;
    }
    try {
      out = fit_scaling(g, y);
      valid = true;
    } catch (const Error&) {
      valid = false;
    }
  };
  attempt(counts, f.counts, f.counts_valid);
  attempt(ky, f.ky, f.ky_valid);
  attempt(upper, f.upper, f.upper_valid);
  attempt(eqd, f.equilibrium_dim, f.equilibrium_dim_valid);
  return f;
}

RunRecord run_sweep(const RunConfig& config) {
  RunRecord rec;
  rec.config_hash = config_hash(config);
  rec.version = code_version();
  rec.scenario = scenario_name(config.scenario);
  rec.config_json = canonical_json(config);
  rec.started = utc_now();

  const std::size_t count = config.sweep.gammas.size();
  rec.results.resize(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) rec.results[i] = run_gamma(config, config.sweep.gammas[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  rec.fits = fit_record(rec.results);
  rec.finished = utc_now();
  return rec;
}

std::filesystem::path run_directory(const std::filesystem::path& out_dir, const std::string& hash) {
  return out_dir / hash;
}

SweepOutcome run_or_load_sweep(const RunConfig& config, const std::filesystem::path& out_dir, bool force) {
  SweepOutcome out;
  out.directory = run_directory(out_dir, config_hash(config));
  if (!force && std::filesystem::exists(out.directory / "manifest.json")) {
    out.record = load_record(out.directory);
    out.reused = true;
    return out;
  }
  out.record = run_sweep(config);
  emit_report(out.record, out.directory);
  return out;
}

}  // namespace wavedim
