#include "wavedim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "wavedim/error.hpp"

namespace wavedim {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double read_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kNaN;
  return j.at(key).get<double>();
}

json fit_json(const ScalingFit& f, bool valid) {
  if (!valid) return nullptr;
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

void read_fit(const json& j, const char* key, ScalingFit& f, bool& valid) {
  valid = j.contains(key) && !j.at(key).is_null();
  if (!valid) return;
  const json& v = j.at(key);
  f.slope = v.at("slope").get<double>();
  f.intercept = v.at("intercept").get<double>();
  f.r2 = v.at("r2").get<double>();
}

json result_json(const GammaResult& r) {
  json j;
  j["gamma"] = r.gamma;
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["modes"] = r.modes;
  j["dt"] = number(r.dt);
  j["burn_in"] = number(r.burn_in);
  j["qr_interval"] = number(r.qr_interval);
  j["bd"] = number(r.bd);
  j["unstable_count"] = r.unstable_count;
  j["instability_index"] = r.instability_index;
  j["count_complete"] = r.count_complete;
  j["ky_dimension"] = number(r.ky_dimension);
  j["ky_source"] = r.ky_source;
  j["trajectory_ky"] = number(r.trajectory_ky);
  j["equilibrium_ky"] = number(r.equilibrium_ky);
  j["truncated"] = r.truncated;
  j["converged"] = r.converged;
  j["drift"] = number(r.drift);
  j["tangents"] = r.tangents;
  j["dimension"] = r.dimension;
  j["exponent_sum"] = number(r.exponent_sum);
  json top = json::array();
  for (double x : r.top_exponents) top.push_back(number(x));
  j["top_exponents"] = top;
  json q = json::array();
  for (double x : r.q_curve) q.push_back(number(x));
  j["q_curve"] = q;
  j["bound_d1"] = number(r.bound_d1);
  j["bound_d1_majorant"] = number(r.bound_d1_majorant);
  j["bound_d1_simple"] = number(r.bound_d1_simple);
  j["bound_d2"] = number(r.bound_d2);
  j["bound_d3plus"] = number(r.bound_d3plus);
  j["upper"] = number(r.upper);
  j["equilibrium_dim"] = number(r.equilibrium_dim);
  j["lower_ok"] = r.lower_ok;
  j["upper_ok"] = r.upper_ok;
  return j;
}

std::vector<double> read_list(const json& j, const char* key) {
  std::vector<double> out;
  for (const json& v : j.at(key)) out.push_back(v.is_null() ? kNaN : v.get<double>());
  return out;
}

GammaResult result_from_json(const json& j) {
  GammaResult r;
  r.gamma = j.at("gamma").get<double>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.modes = j.at("modes").get<std::size_t>();
  r.dt = read_number(j, "dt");
  r.burn_in = read_number(j, "burn_in");
  r.qr_interval = read_number(j, "qr_interval");
  r.bd = read_number(j, "bd");
  r.unstable_count = j.at("unstable_count").get<std::size_t>();
  r.instability_index = j.at("instability_index").get<std::size_t>();
  r.count_complete = j.at("count_complete").get<bool>();
  r.ky_dimension = read_number(j, "ky_dimension");
  r.ky_source = j.at("ky_source").get<std::string>();
  r.trajectory_ky = read_number(j, "trajectory_ky");
  r.equilibrium_ky = read_number(j, "equilibrium_ky");
  r.truncated = j.at("truncated").get<bool>();
  r.converged = j.at("converged").get<bool>();
  r.drift = read_number(j, "drift");
  r.tangents = j.at("tangents").get<std::size_t>();
  r.dimension = j.at("dimension").get<std::size_t>();
  r.exponent_sum = read_number(j, "exponent_sum");
  r.top_exponents = read_list(j, "top_exponents");
  r.q_curve = read_list(j, "q_curve");
  r.bound_d1 = read_number(j, "bound_d1");
  r.bound_d1_majorant = read_number(j, "bound_d1_majorant");
  r.bound_d1_simple = read_number(j, "bound_d1_simple");
  r.bound_d2 = read_number(j, "bound_d2");
  r.bound_d3plus = read_number(j, "bound_d3plus");
  r.upper = read_number(j, "upper");
  r.equilibrium_dim = read_number(j, "equilibrium_dim");
  r.lower_ok = j.at("lower_ok").get<bool>();
  r.upper_ok = j.at("upper_ok").get<bool>();
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt("%.10g", x);
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "gamma",          "ok",           "modes",          "dt",           "qr_interval",     "bd",
      "unstable_count", "instability_index", "ky_dimension", "ky_source", "trajectory_ky",  "equilibrium_ky",
      "truncated",      "converged",    "drift",          "tangents",     "exponent_sum",    "bound_d1",
      "bound_d1_majorant", "bound_d1_simple", "bound_d2",  "bound_d3plus", "upper",          "equilibrium_dim",
      "lower_ok",       "upper_ok",     "error"};
  return cols;
}

std::string summary_csv(const RunRecord& record) {
  std::ostringstream out;
  const auto& cols = summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const GammaResult& r : record.results) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << format_number(r.gamma) << ',' << (r.ok ? 1 : 0) << ',' << r.modes << ',' << format_number(r.dt) << ','
        << format_number(r.qr_interval) << ',' << format_number(r.bd) << ',' << r.unstable_count << ',' << r.instability_index << ','
        << format_number(r.ky_dimension) << ',' << r.ky_source << ',' << format_number(r.trajectory_ky) << ','
        << format_number(r.equilibrium_ky) << ',' << (r.truncated ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ','
        << format_number(r.drift) << ',' << r.tangents << ',' << format_number(r.exponent_sum) << ','
        << format_number(r.bound_d1) << ',' << format_number(r.bound_d1_majorant) << ','
        << format_number(r.bound_d1_simple) << ',' << format_number(r.bound_d2) << ','
        << format_number(r.bound_d3plus) << ',' << format_number(r.upper) << ','
        << format_number(r.equilibrium_dim) << ',' << (r.lower_ok ? 1 : 0) << ',' << (r.upper_ok ? 1 : 0) << ','
        << err << '\n';
  }
  return out.str();
}

std::string q_curves_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "gamma,n,q\n";
  for (const GammaResult& r : record.results) {
    for (std::size_t n = 0; n < r.q_curve.size(); ++n) {
      out << format_number(r.gamma) << ',' << n + 1 << ',' << format_number(r.q_curve[n]) << '\n';
    }
  }
  return out.str();
}

std::string manifest_json(const RunRecord& record) {
  json j;
  j["config_hash"] = record.config_hash;
  j["version"] = record.version;
  j["scenario"] = record.scenario;
  j["config"] = record.config_json.empty() ? json(nullptr) : json::parse(record.config_json);
  json rows = json::array();
  for (const GammaResult& r : record.results) rows.push_back(result_json(r));
  j["results"] = rows;
  j["fits"] = {{"counts", fit_json(record.fits.counts, record.fits.counts_valid)},
               {"ky", fit_json(record.fits.ky, record.fits.ky_valid)},
               {"upper", fit_json(record.fits.upper, record.fits.upper_valid)},
               {"equilibrium_dim", fit_json(record.fits.equilibrium_dim, record.fits.equilibrium_dim_valid)}};
  return j.dump(2) + "\n";
}

RunRecord parse_manifest(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
  RunRecord r;
  try {
    r.config_hash = j.at("config_hash").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    if (!j.at("config").is_null()) r.config_json = j.at("config").dump();
    for (const json& row : j.at("results")) r.results.push_back(result_from_json(row));
    const json& f = j.at("fits");
    read_fit(f, "counts", r.fits.counts, r.fits.counts_valid);
    read_fit(f, "ky", r.fits.ky, r.fits.ky_valid);
    read_fit(f, "upper", r.fits.upper, r.fits.upper_valid);
    read_fit(f, "equilibrium_dim", r.fits.equilibrium_dim, r.fits.equilibrium_dim_valid);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
  return r;
}

std::string report_text(const RunRecord& record) {
  std::ostringstream out;
  out << "wavedim sweep report\n"
      << "====================\n\n"
      << "NOTE: the attractor dimension is not computable directly. The column ky_dimension is the\n"
      << "Kaplan-Yorke (Lyapunov) dimension of the Galerkin truncation, taken as the largest value over\n"
      << "the trajectory, any restarts and the u = 0 equilibrium when it is stationary. It is a proxy.\n\n"
      << "config hash  " << record.config_hash << '\n'
      << "scenario     " << record.scenario << '\n'
      << "version      " << record.version << '\n'
      << "points       " << record.results.size() << " (" << record.failures() << " failed)\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%10s %6s %8s %8s %10s %12s %8s %6s\n", "gamma", "M", "2*count", "B_d", "KY",
                "upper", "source", "chain");
  out << line;
  for (const GammaResult& r : record.results) {
    if (!r.ok) {
      std::snprintf(line, sizeof line, "%10.4g  failed: %s\n", r.gamma, r.error.c_str());
      out << line;
      continue;
    }
    std::snprintf(line, sizeof line, "%10.4g %6zu %8zu %8.4g %10.4f %12.6g %8s %6s\n", r.gamma, r.modes,
                  r.instability_index, r.bd, r.ky_dimension, r.upper, r.ky_source.substr(0, 8).c_str(),
                  r.lower_ok && r.upper_ok ? "ok" : "BROKEN");
    out << line;
  }
  out << '\n';
  auto fit_line = [&](const char* name, const ScalingFit& f, bool valid) {
    if (!valid) {
      std::snprintf(line, sizeof line, "slope %-16s n/a\n", name);
    } else {
      std::snprintf(line, sizeof line, "slope %-16s %.4f (r2 %.4f)\n", name, f.slope, f.r2);
    }
    out << line;
  };
  fit_line("counts", record.fits.counts, record.fits.counts_valid);
  fit_line("ky", record.fits.ky, record.fits.ky_valid);
  fit_line("upper", record.fits.upper, record.fits.upper_valid);
  fit_line("equilibrium_dim", record.fits.equilibrium_dim, record.fits.equilibrium_dim_valid);
  return out.str();
}

std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<PlotSeries>& series) {
  struct Clean {
    const PlotSeries* s;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Clean> clean;
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const PlotSeries& s : series) {
    Clean c{&s, {}};
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (s.x[i] > 0.0 && s.y[i] > 0.0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        c.pts.emplace_back(std::log10(s.x[i]), std::log10(s.y[i]));
        x0 = std::min(x0, c.pts.back().first);
        x1 = std::max(x1, c.pts.back().first);
        y0 = std::min(y0, c.pts.back().second);
        y1 = std::max(y1, c.pts.back().second);
      }
    }
    if (!c.pts.empty()) clean.push_back(std::move(c));
  }
  if (clean.empty()) return "";
  x0 = std::floor(x0);
  x1 = std::max(std::ceil(x1), x0 + 1.0);
  y0 = std::floor(y0);
  y1 = std::max(std::ceil(y1), y0 + 1.0);

  const double width = 720;
  const double height = 480;
  const double left = 80;
  const double right = 200;
  const double top = 40;
  const double bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double lx) { return left + (lx - x0) / (x1 - x0) * pw; };
  auto py = [&](double ly) { return top + ph - (ly - y0) / (y1 - y0) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
      << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(x0); e <= static_cast<int>(x1); ++e) {
    const double x = px(e);
    out << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << top << "\" x2=\"" << fmt("%.2f", x) << "\" y2=\""
        << top + ph << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">1e" << e
        << "</text>\n";
  }
  for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e) {
    const double y = py(e);
    out << "<line x1=\"" << left << "\" y1=\"" << fmt("%.2f", y) << "\" x2=\"" << left + pw << "\" y2=\""
        << fmt("%.2f", y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << fmt("%.2f", y + 4) << "\" text-anchor=\"end\">1e" << e
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << escape_xml(xlabel) << "</text>\n";
  out << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">" << escape_xml(ylabel) << "</text>\n";

  for (std::size_t i = 0; i < clean.size(); ++i) {
    const char* color = colors[i % (sizeof colors / sizeof colors[0])];
    const Clean& c = clean[i];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (c.s->dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t k = 0; k < c.pts.size(); ++k) {
      out << (k ? " " : "") << fmt("%.2f", px(c.pts[k].first)) << ',' << fmt("%.2f", py(c.pts[k].second));
    }
    out << "\"/>\n";
    for (const auto& p : c.pts) {
      out << "<circle cx=\"" << fmt("%.2f", px(p.first)) << "\" cy=\"" << fmt("%.2f", py(p.second))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    out << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (c.s->dashed ? " stroke-dasharray=\"6 4\"" : "")
        << "/>\n";
    out << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << escape_xml(c.s->name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string sweep_plot_svg(const RunRecord& record) {
  PlotSeries lower{"2 x unstable modes", {}, {}, false};
  PlotSeries ky{"KY dimension", {}, {}, false};
  PlotSeries upper{"upper bound", {}, {}, true};
  PlotSeries simple{"d=1 simple bound", {}, {}, true};
  PlotSeries eqd{"equilibrium root", {}, {}, false};
  for (const GammaResult& r : record.results) {
    if (!r.ok) continue;
    const double x = 1.0 / r.gamma;
    lower.x.push_back(x);
    lower.y.push_back(static_cast<double>(r.instability_index));
    ky.x.push_back(x);
    ky.y.push_back(r.ky_dimension);
    upper.x.push_back(x);
    upper.y.push_back(r.upper);
    simple.x.push_back(x);
    simple.y.push_back(r.bound_d1_simple);
    eqd.x.push_back(x);
    eqd.y.push_back(r.equilibrium_dim);
  }
  return loglog_svg("dimension estimates and bounds", "1/gamma", "dimension", {lower, ky, upper, simple, eqd});
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void emit_report(const RunRecord& record, const std::filesystem::path& dir) {
  write_file(dir / "manifest.json", manifest_json(record));
  json ts = {{"started", record.started}, {"finished", record.finished}};
  write_file(dir / "timestamps.json", ts.dump(2) + "\n");
  write_file(dir / "summary.csv", summary_csv(record));
  write_file(dir / "q_curves.csv", q_curves_csv(record));
  write_file(dir / "report.txt", report_text(record));
  const std::string svg = sweep_plot_svg(record);
  std::error_code ec;
  if (svg.empty()) {
    std::filesystem::remove(dir / "plot.svg", ec);
  } else {
    write_file(dir / "plot.svg", svg);
  }
}

RunRecord load_record(const std::filesystem::path& dir) {
  RunRecord r = parse_manifest(read_file(dir / "manifest.json"));
  if (std::filesystem::exists(dir / "timestamps.json")) {
    try {
      const json ts = json::parse(read_file(dir / "timestamps.json"));
      r.started = ts.value("started", "");
      r.finished = ts.value("finished", "");
    } catch (const json::exception&) {
      throw IoError("malformed " + (dir / "timestamps.json").string());
    }
  }
  return r;
}

}  // namespace wavedim
