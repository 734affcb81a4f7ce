#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wavedim/dynamics.hpp"
#include "wavedim/polynomial.hpp"
#include "wavedim/spectral.hpp"

namespace wavedim {

enum class Scenario { Linear, GradientCubic, Rotational, Custom };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct ForcingEntry {
  std::size_t mode = 1;  ///< 1-based scalar mode index
  int component = 1;     ///< 1-based
  double value = 0.0;
};

struct LyapunovSettings {
  std::size_t tangents = 0;  ///< 0 means 2MN
  double duration = 200.0;
  double qr_interval = 0.5;
  double epsilon = -1.0;     ///< negative means the default shift
  std::size_t q_every = 0;
  double burn_in = -1.0;     ///< negative means burn_in_factor / gamma
};

struct SweepSettings {
  std::vector<double> gammas{0.2, 0.1, 0.05, 0.025};
  double burn_in_factor = 20.0;
  bool auto_modes = true;        ///< raise M to max(modes, 64, 4 ceil(b / (gamma sqrt(lambda_1))))
  std::size_t tangents = 0;      ///< 0 selects min(2MN, 2 index + 16)
  double duration = 50.0;        ///< averaging window of the exponents
  std::size_t restarts = 0;      ///< extra seeded trajectories
  std::size_t bd_samples = 64;   ///< states used for B_d
  std::size_t q_every = 20;      ///< QR intervals between q(n) samples
  bool equilibrium = true;       ///< include u = 0 as a candidate when it is stationary
};

/// Resolved configuration of every subcommand. Defaults apply to absent keys.
struct RunConfig {
  Scenario scenario = Scenario::Rotational;
  std::vector<double> lengths{3.141592653589793};
  std::size_t modes = 16;
  int components = 2;
  double gamma = 0.1;
  double dt = 0.0;  ///< 0 means the largest admissible step
  double duration = 10.0;
  std::size_t stride = 10;
  double rotation_strength = 1.0;
  bool rotational = true;
  std::vector<Monomial> potential;
  std::vector<ForcingEntry> forcing;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = "out";
  LyapunovSettings lyapunov;
  SweepSettings sweep;
};

/// Parses TOML text; throws InvalidInput on syntax errors, unknown keys or invalid values.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Accepts a number or a string such as "pi", "2*pi", "pi/2", "1.5".
double parse_length(const std::string& text);

Domain make_domain(const RunConfig& config);
/// Nonlinearity of the scenario at damping gamma with M modes.
NonlinearitySpec make_spec(const RunConfig& config, double gamma, std::size_t modes);

/// Canonical JSON of every setting that affects results (threads and out_dir excluded).
std::string canonical_json(const RunConfig& config);
/// FNV-1a 64 of the canonical JSON as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace wavedim
