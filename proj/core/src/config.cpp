#include "wavedim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "toml.hpp"
#include "wavedim/error.hpp"

namespace wavedim {

using nlohmann::json;

Scenario parse_scenario(const std::string& name) {
  if (name == "linear") return Scenario::Linear;
  if (name == "gradient-cubic") return Scenario::GradientCubic;
  if (name == "rotational") return Scenario::Rotational;
  if (name == "custom") return Scenario::Custom;
  throw InvalidInput("unknown scenario '" + name + "' (linear, gradient-cubic, rotational, custom)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Linear: return "linear";
    case Scenario::GradientCubic: return "gradient-cubic";
    case Scenario::Rotational: return "rotational";
    case Scenario::Custom: return "custom";
  }
  return "custom";
}

double parse_length(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != ' ') t.push_back(c);
  }
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InvalidInput("cannot read length '" + text + "'");
    }
    if (used != s.size()) throw InvalidInput("cannot read length '" + text + "'");
    return v;
  };
  double value = 0.0;
  const auto at = t.find("pi");
  if (at == std::string::npos) {
    value = number(t);
  } else {
    double coeff = 1.0;
    std::string head = t.substr(0, at);
    if (!head.empty()) {
      if (head.back() == '*') head.pop_back();
      coeff = number(head);
    }
    double den = 1.0;
    const std::string tail = t.substr(at + 2);
    if (!tail.empty()) {
      if (tail.front() != '/') throw InvalidInput("cannot read length '" + text + "'");
      den = number(tail.substr(1));
    }
    value = coeff * std::numbers::pi / den;
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw InvalidInput("length '" + text + "' must be positive");
  return value;
}

namespace {

void check_keys(const json& table, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : table.items()) {
    if (!ok.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& t, const char* key, double fallback, const std::string& where) {
  if (!t.contains(key)) return fallback;
  const json& v = t.at(key);
  if (!v.is_number()) throw InvalidInput(where + "." + key + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& t, const char* key, std::size_t fallback, const std::string& where) {
  if (!t.contains(key)) return fallback;
  const json& v = t.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InvalidInput(where + "." + key + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

bool get_bool(const json& t, const char* key, bool fallback, const std::string& where) {
  if (!t.contains(key)) return fallback;
  const json& v = t.at(key);
  if (!v.is_boolean()) throw InvalidInput(where + "." + key + " must be true or false");
  return v.get<bool>();
}

double length_value(const json& v) {
  if (v.is_number()) {
    const double x = v.get<double>();
    if (!(x > 0.0)) throw InvalidInput("domain lengths must be positive");
    return x;
  }
  if (v.is_string()) return parse_length(v.get<std::string>());
  throw InvalidInput("domain lengths must be numbers or strings such as \"pi\"");
}

const json& table_or_empty(const json& root, const char* name) {
  static const json empty = json::object();
  if (!root.contains(name)) return empty;
  const json& t = root.at(name);
  if (!t.is_object()) throw InvalidInput(std::string("'") + name + "' must be a table");
  return t;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  const json root = parse_toml(text);
  check_keys(root, "the top level",
             {"scenario", "seed", "threads", "out_dir", "domain", "model", "potential", "forcing", "lyapunov", "sweep"});
  RunConfig c;
  if (root.contains("scenario")) {
    if (!root.at("scenario").is_string()) throw InvalidInput("scenario must be a string");
    c.scenario = parse_scenario(root.at("scenario").get<std::string>());
  }
  c.seed = get_count(root, "seed", 1, "config");
  c.threads = static_cast<unsigned>(std::max<std::size_t>(1, get_count(root, "threads", 1, "config")));
  if (root.contains("out_dir")) {
    if (!root.at("out_dir").is_string()) throw InvalidInput("out_dir must be a string");
    c.out_dir = root.at("out_dir").get<std::string>();
  }

  const json& dom = table_or_empty(root, "domain");
  check_keys(dom, "[domain]", {"lengths", "length"});
  if (dom.contains("lengths") && dom.contains("length")) throw InvalidInput("give either length or lengths");
  if (dom.contains("length")) {
    c.lengths = {length_value(dom.at("length"))};
  } else if (dom.contains("lengths")) {
    const json& l = dom.at("lengths");
    if (!l.is_array() || l.empty() || l.size() > 2) throw InvalidInput("[domain] lengths must list 1 or 2 values");
    c.lengths.clear();
    for (const json& v : l) c.lengths.push_back(length_value(v));
  }

  const json& model = table_or_empty(root, "model");
  check_keys(model, "[model]",
             {"modes", "components", "gamma", "dt", "duration", "stride", "rotation_strength", "amplitude"});
  c.modes = get_count(model, "modes", c.modes, "model");
  const bool explicit_components = model.contains("components");
  c.components = static_cast<int>(get_count(model, "components", 1, "model"));
  c.gamma = get_number(model, "gamma", c.gamma, "model");
  c.dt = get_number(model, "dt", c.dt, "model");
  c.duration = get_number(model, "duration", c.duration, "model");
  c.stride = get_count(model, "stride", c.stride, "model");
  c.rotation_strength = get_number(model, "rotation_strength", c.rotation_strength, "model");
  c.amplitude = get_number(model, "amplitude", c.amplitude, "model");

  const json& pot = table_or_empty(root, "potential");
  check_keys(pot, "[potential]", {"terms", "rotational"});
  c.rotational = c.scenario == Scenario::Rotational;
  if (c.scenario == Scenario::Custom) {
    c.rotational = get_bool(pot, "rotational", false, "potential");
  } else if (!pot.empty()) {
    throw InvalidInput("[potential] applies only to the custom scenario");
  }
  if (c.scenario == Scenario::Rotational || c.rotational) {
    if (explicit_components && c.components != 2) throw InvalidInput("the rotational term needs components = 2");
    c.components = 2;
  }
  if (c.components < 1) throw InvalidInput("components must be at least 1");
  if (c.scenario == Scenario::GradientCubic) {
    c.potential = Polynomial::separable_power(c.components, 0.25, 4).terms();
  } else if (c.scenario == Scenario::Custom && pot.contains("terms")) {
    const json& terms = pot.at("terms");
    if (!terms.is_array()) throw InvalidInput("[potential] terms must be an array of [coefficient, powers...]");
    for (const json& t : terms) {
      if (!t.is_array() || t.size() != static_cast<std::size_t>(c.components) + 1 || !t[0].is_number()) {
        throw InvalidInput("each potential term needs a coefficient and one power per component");
      }
      Monomial m;
      m.coefficient = t[0].get<double>();
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (!t[i].is_number_integer() || t[i].get<long long>() < 0) {
          throw InvalidInput("potential powers must be non-negative integers");
        }
        m.powers.push_back(static_cast<int>(t[i].get<long long>()));
      }
      c.potential.push_back(m);
    }
    const Polynomial p(c.components, c.potential);
    if (!p.bounded_below()) throw InvalidInput("the potential is not bounded below");
  }

  const json& forcing = table_or_empty(root, "forcing");
  check_keys(forcing, "[forcing]", {"entries"});
  if (forcing.contains("entries")) {
    for (const json& e : forcing.at("entries")) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          !e[2].is_number()) {
        throw InvalidInput("forcing entries are [mode, component, value] with 1-based mode and component");
      }
      ForcingEntry f;
      const long long mode = e[0].get<long long>();
      const long long comp = e[1].get<long long>();
      if (mode < 1 || comp < 1 || comp > c.components) throw InvalidInput("forcing entry index out of range");
      f.mode = static_cast<std::size_t>(mode);
      f.component = static_cast<int>(comp);
      f.value = e[2].get<double>();
      c.forcing.push_back(f);
    }
  }

  const json& lyap = table_or_empty(root, "lyapunov");
  check_keys(lyap, "[lyapunov]", {"tangents", "duration", "qr_interval", "epsilon", "q_every", "burn_in"});
  c.lyapunov.tangents = get_count(lyap, "tangents", c.lyapunov.tangents, "lyapunov");
  c.lyapunov.duration = get_number(lyap, "duration", c.lyapunov.duration, "lyapunov");
  c.lyapunov.qr_interval = get_number(lyap, "qr_interval", c.lyapunov.qr_interval, "lyapunov");
  c.lyapunov.epsilon = get_number(lyap, "epsilon", c.lyapunov.epsilon, "lyapunov");
  c.lyapunov.q_every = get_count(lyap, "q_every", c.lyapunov.q_every, "lyapunov");
  c.lyapunov.burn_in = get_number(lyap, "burn_in", c.lyapunov.burn_in, "lyapunov");

  const json& sweep = table_or_empty(root, "sweep");
  check_keys(sweep, "[sweep]",
             {"gammas", "burn_in_factor", "auto_modes", "tangents", "duration", "restarts", "bd_samples", "q_every",
              "equilibrium"});
  if (sweep.contains("gammas")) {
    const json& g = sweep.at("gammas");
    if (!g.is_array() || g.empty()) throw InvalidInput("[sweep] gammas must be a non-empty array");
    c.sweep.gammas.clear();
    for (const json& v : g) {
      if (!v.is_number()) throw InvalidInput("[sweep] gammas must be numbers");
      c.sweep.gammas.push_back(v.get<double>());
    }
  }
  c.sweep.burn_in_factor = get_number(sweep, "burn_in_factor", c.sweep.burn_in_factor, "sweep");
  c.sweep.auto_modes = get_bool(sweep, "auto_modes", c.sweep.auto_modes, "sweep");
  c.sweep.tangents = get_count(sweep, "tangents", c.sweep.tangents, "sweep");
  c.sweep.duration = get_number(sweep, "duration", c.sweep.duration, "sweep");
  c.sweep.restarts = get_count(sweep, "restarts", c.sweep.restarts, "sweep");
  c.sweep.bd_samples = get_count(sweep, "bd_samples", c.sweep.bd_samples, "sweep");
  c.sweep.q_every = get_count(sweep, "q_every", c.sweep.q_every, "sweep");
  c.sweep.equilibrium = get_bool(sweep, "equilibrium", c.sweep.equilibrium, "sweep");

  if (c.modes < 1) throw InvalidInput("modes must be at least 1");
  if (!(c.gamma > 0.0)) throw InvalidInput("gamma must be positive");
  if (c.dt < 0.0) throw InvalidInput("dt must be non-negative");
  if (!(c.duration >= 0.0)) throw InvalidInput("duration must be non-negative");
  if (c.stride < 1) throw InvalidInput("stride must be at least 1");
  if (!(c.lyapunov.duration > 0.0) || !(c.lyapunov.qr_interval > 0.0)) {
    throw InvalidInput("lyapunov duration and qr_interval must be positive");
  }
  if (!(c.sweep.duration > 0.0) || c.sweep.burn_in_factor < 0.0) {
    throw InvalidInput("sweep duration must be positive and burn_in_factor non-negative");
  }
  if (c.sweep.bd_samples < 10) throw InvalidInput("sweep bd_samples must be at least 10");
  for (double g : c.sweep.gammas) {
    if (!(g > 0.0)) throw InvalidInput("sweep gammas must be positive");
  }
  if (!std::is_sorted(c.sweep.gammas.begin(), c.sweep.gammas.end(), std::greater<>())) {
    throw InvalidInput("sweep gammas must be sorted descending");
  }
  if (std::adjacent_find(c.sweep.gammas.begin(), c.sweep.gammas.end()) != c.sweep.gammas.end()) {
    throw InvalidInput("sweep gammas must be distinct");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

Domain make_domain(const RunConfig& config) {
  return config.lengths.size() == 1 ? Domain::interval(config.lengths[0])
                                    : Domain::rectangle(config.lengths[0], config.lengths[1]);
}

NonlinearitySpec make_spec(const RunConfig& config, double gamma, std::size_t modes) {
  NonlinearitySpec s;
  s.gamma = gamma;
  s.rotational = config.rotational;
  s.rotation_strength = config.rotation_strength;
  if (!config.potential.empty()) s.potential = Polynomial(config.components, config.potential);
  if (!config.forcing.empty()) {
    s.forcing = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(modes), config.components);
    for (const ForcingEntry& f : config.forcing) {
      if (f.mode > modes) throw InvalidInput("forcing mode " + std::to_string(f.mode) + " exceeds M");
      s.forcing(static_cast<Eigen::Index>(f.mode - 1), f.component - 1) += f.value;
    }
  }
  return s;
}

std::string canonical_json(const RunConfig& c) {
  json j;
  j["scenario"] = scenario_name(c.scenario);
  j["lengths"] = c.lengths;
  j["modes"] = c.modes;
  j["components"] = c.components;
  j["gamma"] = c.gamma;
  j["dt"] = c.dt;
  j["duration"] = c.duration;
  j["stride"] = c.stride;
  j["rotation_strength"] = c.rotation_strength;
  j["rotational"] = c.rotational;
  json pot = json::array();
  for (const Monomial& m : c.potential) pot.push_back({{"coefficient", m.coefficient}, {"powers", m.powers}});
  j["potential"] = pot;
  json forcing = json::array();
  for (const ForcingEntry& f : c.forcing) forcing.push_back({f.mode, f.component, f.value});
  j["forcing"] = forcing;
  j["amplitude"] = c.amplitude;
  j["seed"] = c.seed;
  j["lyapunov"] = {{"tangents", c.lyapunov.tangents},       {"duration", c.lyapunov.duration},
                   {"qr_interval", c.lyapunov.qr_interval}, {"epsilon", c.lyapunov.epsilon},
                   {"q_every", c.lyapunov.q_every},         {"burn_in", c.lyapunov.burn_in}};
  j["sweep"] = {{"gammas", c.sweep.gammas},         {"burn_in_factor", c.sweep.burn_in_factor},
                {"auto_modes", c.sweep.auto_modes}, {"tangents", c.sweep.tangents},
                {"duration", c.sweep.duration},     {"restarts", c.sweep.restarts},
                {"bd_samples", c.sweep.bd_samples}, {"q_every", c.sweep.q_every},
                {"equilibrium", c.sweep.equilibrium}};
  return j.dump();
}

std::string config_hash(const RunConfig& config) {
  const std::string text = canonical_json(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wavedim
