#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavedim/config.hpp"
#include "wavedim/fit.hpp"

namespace wavedim {

/// Outcome at one damping value. NaN marks a quantity that does not apply.
struct GammaResult {
  double gamma = 0.0;
  bool ok = false;
  std::string error;

  std::size_t modes = 0;
  double dt = 0.0;
  double qr_interval = 0.0;  ///< configured value, shortened when the growth estimate demands it
  double burn_in = 0.0;
  double bd = 0.0;

  std::size_t unstable_count = 0;
  std::size_t instability_index = 0;
  bool count_complete = true;

  double ky_dimension = 0.0;
  std::string ky_source;  ///< trajectory, restart-<r> or equilibrium
  double trajectory_ky = 0.0;
  double equilibrium_ky = 0.0;
  bool truncated = false;
  bool converged = false;
  double drift = 0.0;
  std::size_t tangents = 0;
  std::size_t dimension = 0;  ///< 2MN
  double exponent_sum = 0.0;  ///< over the computed exponents
  std::vector<double> top_exponents;
  std::vector<double> q_curve;

  double bound_d1 = 0.0;  ///< root n*
  double bound_d1_majorant = 0.0;
  double bound_d1_simple = 0.0;
  double bound_d2 = 0.0;
  double bound_d3plus = 0.0;
  double upper = 0.0;  ///< the bound of the domain dimension
  double equilibrium_dim = 0.0;

  bool lower_ok = false;
  bool upper_ok = false;
};

struct SweepFits {
  ScalingFit counts;
  ScalingFit ky;
  ScalingFit upper;
  ScalingFit equilibrium_dim;
  bool counts_valid = false;
  bool ky_valid = false;
  bool upper_valid = false;
  bool equilibrium_dim_valid = false;
};

struct RunRecord {
  std::string config_hash;
  std::string version;
  std::string scenario;
  std::string config_json;  ///< canonical settings
  std::vector<GammaResult> results;
  SweepFits fits;
  std::string started;   ///< ISO 8601, kept out of the manifest
  std::string finished;

  std::size_t failures() const;
  bool partial() const { return failures() > 0 && failures() < results.size(); }
  bool failed() const { return !results.empty() && failures() == results.size(); }
};

std::string code_version();

/// Runs one damping value of the sweep; failures are caught and recorded.
GammaResult run_gamma(const RunConfig& config, double gamma);

/// Every damping value of config.sweep.gammas on config.threads workers.
RunRecord run_sweep(const RunConfig& config);

/// Fits of the count, KY, upper-bound and equilibrium-dimension series over successful points.
SweepFits fit_record(const std::vector<GammaResult>& results);

/// Directory of a run, out_dir / config_hash.
std::filesystem::path run_directory(const std::filesystem::path& out_dir, const std::string& hash);

struct SweepOutcome {
  RunRecord record;
  std::filesystem::path directory;
  bool reused = false;  ///< an existing manifest was loaded instead of running
};

/// Runs and persists a sweep unless a manifest for the same hash exists and force is false.
SweepOutcome run_or_load_sweep(const RunConfig& config, const std::filesystem::path& out_dir, bool force);

}  // namespace wavedim
