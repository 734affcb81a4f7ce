#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wavedim/bounds.hpp"
#include "wavedim/config.hpp"
#include "wavedim/dynamics.hpp"
#include "wavedim/error.hpp"
#include "wavedim/ineq.hpp"
#include "wavedim/lyapunov.hpp"
#include "wavedim/report.hpp"
#include "wavedim/spectral.hpp"
#include "wavedim/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavedim;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2, kPartial = 3 };

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool force = false;
};

RunConfig resolve(const Globals& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = std::max(1u, *g.threads);
  return c;
}

/// With --out the payloads go to files; otherwise the primary table goes to stdout.
void deliver(const Globals& g, const std::string& csv_name, const std::string& csv, const std::string& json_name,
             const json& summary, const std::string& svg_name = "", const std::string& svg = "") {
  if (g.out.empty()) {
    std::cout << csv;
    std::cerr << summary.dump(2) << '\n';
    return;
  }
  const fs::path dir(g.out);
  write_file(dir / csv_name, csv);
  write_file(dir / json_name, summary.dump(2) + "\n");
  if (!svg_name.empty() && !svg.empty()) write_file(dir / svg_name, svg);
  std::cerr << "wrote " << (dir / csv_name).string() << '\n';
}

GalerkinState burned_in(GalerkinModel& model, const RunConfig& c, double dt) {
  const double burn = c.lyapunov.burn_in >= 0.0 ? c.lyapunov.burn_in : c.sweep.burn_in_factor / c.gamma;
  return advance(model, model.random_state(c.seed, c.amplitude), burn, dt);
}

int cmd_spectrum(const Globals& g, std::optional<std::size_t> modes, std::optional<int> components) {
  RunConfig c = resolve(g);
  const Domain dom = make_domain(c);
  const std::size_t m = modes.value_or(c.modes);
  const int n = components.value_or(c.components);
  const Spectrum s = build_spectrum(dom, m, n);
  std::ostringstream csv;
  csv << "n,lambda,i,j,weyl,li_yau\n";
  PlotSeries eig{"lambda_n", {}, {}, false};
  PlotSeries weyl{"Weyl term", {}, {}, true};
  for (std::size_t k = 0; k < s.modes(); ++k) {
    const double w = weyl_estimate(dom, k + 1);
    const double ly = dom.dim() == 2 ? li_yau_lower(dom, k + 1, 1).per_index : std::nan("");
    csv << k + 1 << ',' << format_number(s.lambdas[k]) << ',' << s.indices[k][0] << ',' << s.indices[k][1] << ','
        << format_number(w) << ',' << format_number(ly) << '\n';
    eig.x.push_back(static_cast<double>(k + 1));
    eig.y.push_back(s.lambdas[k]);
    weyl.x.push_back(static_cast<double>(k + 1));
    weyl.y.push_back(w);
  }
  double sum = 0.0;
  for (double x : s.bold_lambdas) sum += x;
  json j = {{"dim", dom.dim()},
            {"lengths", std::vector<double>(dom.lengths().begin(), dom.lengths().end())},
            {"modes", m},
            {"components", n},
            {"lambda_first", s.first()},
            {"lambda_last", s.last()},
            {"vector_sum", sum}};
  deliver(g, "spectrum.csv", csv.str(), "spectrum.json", j, "spectrum.svg",
          loglog_svg("Dirichlet spectrum", "n", "lambda_n", {eig, weyl}));
  return kOk;
}

int cmd_simulate(const Globals& g) {
  RunConfig c = resolve(g);
  GalerkinModel model(make_domain(c), c.modes, c.components, make_spec(c, c.gamma, c.modes));
  const double dt = c.dt > 0.0 ? c.dt : model.max_step();
  const Trajectory tr = simulate(model, model.random_state(c.seed, c.amplitude), c.duration, dt, c.stride, true);
  std::ostringstream csv;
  csv << "t,energy,psi,lyapunov,u_linf\n";
  double max_rise = 0.0;
  double max_u = 0.0;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const TrajectorySample& s = tr.samples[i];
    csv << format_number(s.t) << ',' << format_number(s.energy) << ',' << format_number(s.psi) << ','
        << format_number(s.lyapunov) << ',' << format_number(s.u_linf) << '\n';
    max_u = std::max(max_u, s.u_linf);
    if (i > 0 && std::isfinite(s.lyapunov)) {
      const double span = s.t - tr.samples[i - 1].t;
      if (span > 0.0) max_rise = std::max(max_rise, (s.lyapunov - tr.samples[i - 1].lyapunov) / span);
    }
  }
  json j = {{"scenario", scenario_name(c.scenario)},
            {"config_hash", config_hash(c)},
            {"modes", c.modes},
            {"components", c.components},
            {"gamma", c.gamma},
            {"dt", dt},
            {"duration", c.duration},
            {"samples", tr.samples.size()},
            {"final_energy", tr.samples.back().energy},
            {"max_u_linf", max_u},
            {"max_lyapunov_rise_rate", c.rotational ? json(nullptr) : json(max_rise)}};
  if (tr.states.size() >= 10) j["bd"] = estimate_Bd(model, tr.states, make_domain(c).dim());
  deliver(g, "trajectory.csv", csv.str(), "simulate.json", j);
  return kOk;
}

int cmd_lyapunov(const Globals& g) {
  RunConfig c = resolve(g);
  GalerkinModel model(make_domain(c), c.modes, c.components, make_spec(c, c.gamma, c.modes));
  const double dt = c.dt > 0.0 ? std::min(c.dt, model.max_step()) : model.max_step();
  const GalerkinState start = burned_in(model, c, dt);
  LyapunovOptions o;
  o.tangents = c.lyapunov.tangents;
  o.duration = c.lyapunov.duration;
  o.dt = dt;
  o.qr_interval = c.lyapunov.qr_interval;
  o.epsilon = c.lyapunov.epsilon;
  o.q_every = c.lyapunov.q_every;
  o.seed = c.seed;
  const LyapunovReport r = compute_exponents(model, start, o);
  std::ostringstream csv;
  csv << "index,exponent,cumulative,q\n";
  for (std::size_t k = 0; k < r.exponents.size(); ++k) {
    csv << k + 1 << ',' << format_number(r.exponents[k]) << ',' << format_number(r.cumulative[k]) << ','
        << format_number(k < r.q_samples.size() ? r.q_samples[k] : std::nan("")) << '\n';
  }
  json j = {{"config_hash", config_hash(c)},
            {"ky_dimension", r.ky_dimension},
            {"truncated", r.truncated},
            {"converged", r.converged},
            {"drift", r.drift},
            {"tangents", r.exponents.size()},
            {"dimension", r.dimension},
            {"exponent_sum", r.cumulative.empty() ? 0.0 : r.cumulative.back()},
            {"trace", -c.gamma * static_cast<double>(c.modes) * c.components},
            {"epsilon", r.epsilon},
            {"duration", r.duration},
            {"q_samples", r.q_sample_count}};
  deliver(g, "exponents.csv", csv.str(), "lyapunov.json", j);
  if (!r.converged) std::cerr << "warning: exponents did not converge (drift " << r.drift << ")\n";
  return kOk;
}

int cmd_bounds(const Globals& g, std::optional<double> gamma, std::optional<double> bd, std::optional<int> d,
               std::optional<double> size, std::optional<int> components, std::optional<double> clr) {
  RunConfig c = resolve(g);
  const Domain dom = make_domain(c);
  const int dim = d.value_or(dom.dim());
  const double gm = gamma.value_or(c.gamma);
  const int n = components.value_or(c.components);
  const double sz = size.value_or(dim == 1 ? dom.length(0) : dom.measure());
  double b = 0.0;
  std::string source = "flag";
  if (bd) {
    b = *bd;
  } else {
    GalerkinModel model(dom, c.modes, c.components, make_spec(c, gm, c.modes));
    const double dt = c.dt > 0.0 ? std::min(c.dt, model.max_step()) : model.max_step();
    const GalerkinState s = burned_in(model, c, dt);
    const auto steps = static_cast<std::size_t>(std::ceil(c.duration / dt - 1e-9));
    const std::size_t stride = std::max<std::size_t>(1, steps / c.sweep.bd_samples);
    const Trajectory tr = simulate(model, s, c.duration, dt, stride, true);
    b = estimate_Bd(model, tr.states, dim);
    source = "trajectory";
  }
  std::ostringstream csv;
  csv << "bound,value\n";
  json j = {{"gamma", gm}, {"d", dim}, {"components", n}, {"size", sz}, {"bd", b}, {"bd_source", source}};
  if (dim == 1) {
    const BoundReport r = upper_bound_d1(gm, n, sz, b);
    const double simple = upper_bound_d1_simple(gm, n, sz, b);
    j["coefficient"] = r.coefficient;
    j["d1_root"] = r.root;
    j["d1_majorant"] = r.majorant;
    j["d1_simple"] = simple;
    csv << "d1_root," << format_number(r.root) << "\nd1_majorant," << format_number(r.majorant) << "\nd1_simple,"
        << format_number(simple) << '\n';
  } else if (dim == 2) {
    const double v = upper_bound_d2(gm, n, sz, b);
    j["d2"] = v;
    csv << "d2," << format_number(v) << '\n';
  } else {
    const ClrConstants k = clr_constants(dim, clr ? std::optional<double>(*clr) : std::nullopt);
    const double v = upper_bound_d3plus(gm, n, dim, b, k);
    j["clr"] = k.value;
    j["prefactor"] = clr_prefactor(k);
    j["d3plus"] = v;
    csv << "d3plus," << format_number(v) << '\n';
  }
  deliver(g, "bounds.csv", csv.str(), "bounds.json", j);
  return kOk;
}

int cmd_lower_bound(const Globals& g, std::vector<double> gammas, double a, std::optional<double> b) {
  RunConfig c = resolve(g);
  if (gammas.empty()) gammas = c.sweep.gammas;
  const double bb = b.value_or(c.rotation_strength);
  const Domain dom = make_domain(c);
  const LowerBoundScaling s = lower_bound_scaling(gammas, a, bb, dom);
  std::ostringstream csv;
  csv << "gamma,count,instability_index\n";
  PlotSeries counts{"2 x unstable modes", {}, {}, false};
  for (std::size_t i = 0; i < s.gammas.size(); ++i) {
    const std::size_t index = bb != 0.0 ? 2 * s.counts[i] : s.counts[i];
    csv << format_number(s.gammas[i]) << ',' << s.counts[i] << ',' << index << '\n';
    counts.x.push_back(1.0 / s.gammas[i]);
    counts.y.push_back(static_cast<double>(index));
  }
  json j = {{"a", a},
            {"b", bb},
            {"dim", dom.dim()},
            {"counts", s.counts},
            {"slope", s.fit.slope},
            {"intercept", s.fit.intercept},
            {"r2", s.fit.r2}};
  deliver(g, "lower_bound.csv", csv.str(), "lower_bound.json", j, "lower_bound.svg",
          loglog_svg("instability index", "1/gamma", "2 x count", {counts}));
  return kOk;
}

int cmd_ineq(const Globals& g, const std::string& check, int d, std::size_t n_max, std::size_t seeds, int grid) {
  RunConfig c = resolve(g);
  if (check == "embedding") {
    const double length = make_domain(c).length(0);
    const EmbeddingCheck e = sharp_embedding_check(length, grid > 0 ? grid : 1024, seeds, c.seed);
    std::ostringstream csv;
    csv << "function,ratio,bound\n"
        << "hat," << format_number(e.hat_ratio) << ',' << format_number(e.bound) << '\n'
        << "sine," << format_number(e.sine_ratio) << ',' << format_number(e.bound) << '\n'
        << "random_max," << format_number(e.max_random_ratio) << ',' << format_number(e.bound) << '\n';
    json j = {{"check", check}, {"length", length}, {"hat_fraction", e.hat_ratio / e.bound}, {"pass", e.pass}};
    deliver(g, "ineq.csv", csv.str(), "ineq.json", j);
    return e.pass ? kOk : kNumeric;
  }
  CampaignOptions o;
  if (check == "sub-lemma") {
    o.kind = CampaignKind::SubLemma;
  } else if (check == "inv-sqrt") {
    o.kind = CampaignKind::InvSqrt;
  } else if (check == "rho") {
    if (d == 1) o.kind = CampaignKind::RhoD1;
    else if (d == 2) o.kind = CampaignKind::RhoD2;
    else if (d == 3) o.kind = CampaignKind::RhoD3;
    else throw InvalidInput("--d must be 1, 2 or 3");
  } else {
    throw InvalidInput("unknown check '" + check + "' (sub-lemma, rho, inv-sqrt, embedding)");
  }
  o.families = seeds;
  o.n_max = n_max;
  o.seed = c.seed;
  o.grid = grid;
  o.threads = c.threads;
  const CampaignSummary s = run_campaign(o);
  std::ostringstream csv;
  csv << "seed,n,lhs,rhs,margin,pass\n";
  for (const CampaignRow& r : s.rows) {
    csv << r.seed << ',' << r.n << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
        << format_number(r.margin) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  json j = {{"check", s.kind},      {"families", s.families},     {"passed", s.passed},
            {"min_margin", s.min_margin}, {"max_ratio", s.max_ratio}, {"seed", c.seed}};
  deliver(g, "ineq.csv", csv.str(), "ineq.json", j);
  return s.passed == s.families ? kOk : kNumeric;
}

int sweep_exit(const RunRecord& r) {
  if (r.failed()) return kNumeric;
  if (r.partial()) return kPartial;
  return kOk;
}

int cmd_sweep(const Globals& g) {
  RunConfig c = resolve(g);
  const fs::path out = g.out.empty() ? fs::path(c.out_dir) : fs::path(g.out);
  const SweepOutcome o = run_or_load_sweep(c, out, g.force);
  if (o.reused) std::cerr << "run " << o.record.config_hash << " exists; use --force to recompute\n";
  std::cerr << "results in " << o.directory.string() << '\n';
  std::cout << report_text(o.record);
  return sweep_exit(o.record);
}

int cmd_report(const Globals& g, const std::string& run_dir) {
  fs::path dir;
  if (!run_dir.empty()) {
    dir = run_dir;
  } else {
    RunConfig c = resolve(g);
    dir = run_directory(g.out.empty() ? fs::path(c.out_dir) : fs::path(g.out), config_hash(c));
  }
  const RunRecord r = load_record(dir);
  emit_report(r, dir);
  std::cout << report_text(r);
  return sweep_exit(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension estimates for damped wave equations"};
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", g.config, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads");
  app.add_flag("--force", g.force, "recompute an existing sweep");

  std::optional<std::size_t> sp_modes;
  std::optional<int> sp_components;
  auto* spectrum = app.add_subcommand("spectrum", "Dirichlet eigenvalues of the domain");
  spectrum->add_option("--modes", sp_modes, "number of scalar modes");
  spectrum->add_option("--components", sp_components, "vector components");

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate the Galerkin system");
  auto* lyapunov = app.add_subcommand("lyapunov", "Lyapunov exponents by the QR method");

  std::optional<double> b_gamma, b_bd, b_size, b_clr;
  std::optional<int> b_d, b_components;
  auto* bounds = app.add_subcommand("bounds", "closed-form upper bounds");
  bounds->add_option("--gamma", b_gamma, "damping");
  bounds->add_option("--bd", b_bd, "B_d; estimated from a trajectory when absent");
  bounds->add_option("--d", b_d, "space dimension")->check(CLI::Range(1, 3));
  bounds->add_option("--size", b_size, "length (d = 1) or measure");
  bounds->add_option("--components", b_components, "vector components");
  bounds->add_option("--clr", b_clr, "CLR constant for d >= 3");

  std::vector<double> lb_gammas;
  double lb_a = 0.0;
  std::optional<double> lb_b;
  auto* lower = app.add_subcommand("lower-bound", "unstable mode counts against damping");
  lower->add_option("--gammas", lb_gammas, "damping values")->delimiter(',');
  lower->add_option("--a", lb_a, "real shift a");
  lower->add_option("--b", lb_b, "rotation b");

  std::string iq_check = "rho";
  int iq_d = 1;
  std::size_t iq_n = 64;
  std::size_t iq_seeds = 1000;
  int iq_grid = 0;
  auto* ineq = app.add_subcommand("ineq-test", "randomized inequality campaigns");
  ineq->add_option("--check", iq_check, "sub-lemma, rho, inv-sqrt or embedding")->capture_default_str();
  ineq->add_option("--d", iq_d, "dimension for rho")->capture_default_str();
  ineq->add_option("--n-max", iq_n, "largest family size")->capture_default_str();
  ineq->add_option("--seeds", iq_seeds, "number of seeded families")->capture_default_str();
  ineq->add_option("--grid", iq_grid, "points per axis, 0 for the default");

  auto* sweep = app.add_subcommand("sweep", "damping sweep with persistence");
  std::string rep_dir;
  auto* report = app.add_subcommand("report", "rewrite report files of a stored sweep");
  report->add_option("--run", rep_dir, "run directory; default is out/<config hash>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (*threads_opt) g.threads = threads;

  try {
    if (*spectrum) return cmd_spectrum(g, sp_modes, sp_components);
    if (*simulate_cmd) return cmd_simulate(g);
    if (*lyapunov) return cmd_lyapunov(g);
    if (*bounds) return cmd_bounds(g, b_gamma, b_bd, b_d, b_size, b_components, b_clr);
    if (*lower) return cmd_lower_bound(g, lb_gammas, lb_a, lb_b);
    if (*ineq) return cmd_ineq(g, iq_check, iq_d, iq_n, iq_seeds, iq_grid);
    if (*sweep) return cmd_sweep(g);
    if (*report) return cmd_report(g, rep_dir);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
