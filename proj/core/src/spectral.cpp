#include "wavedim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "wavedim/error.hpp"

namespace wavedim {

Domain::Domain(DomainKind kind, std::vector<double> lengths) : kind_(kind), lengths_(std::move(lengths)) {
  if (lengths_.empty() || lengths_.size() > 3) {
    throw InvalidInput("domain dimension must be 1, 2 or 3");
  }
  for (double l : lengths_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw InvalidInput("domain side lengths must be positive, got " + std::to_string(l));
    }
  }
}

Domain Domain::interval(double length) { return Domain(DomainKind::Interval, {length}); }

Domain Domain::rectangle(double lx, double ly) { return Domain(DomainKind::Rectangle, {lx, ly}); }

Domain Domain::box(std::vector<double> lengths) {
  switch (lengths.size()) {
    case 1:
      return interval(lengths[0]);
    case 2:
      return rectangle(lengths[0], lengths[1]);
    default:
      return Domain(DomainKind::Box, std::move(lengths));
  }
}

double Domain::measure() const {
  double m = 1.0;
  for (double l : lengths_) m *= l;
  return m;
}

namespace {

struct Candidate {
  double lambda;
  ModeIndex index;
};

// All multi-indices with eigenvalue <= cutoff.
std::vector<Candidate> enumerate_below(const Domain& domain, double cutoff) {
  const int d = domain.dim();
  std::array<double, 3> wave{0.0, 0.0, 0.0};
  double floor_sum = 0.0;
  for (int a = 0; a < d; ++a) {
    wave[a] = std::numbers::pi / domain.length(a);
    floor_sum += wave[a] * wave[a];
  }
  std::vector<Candidate> out;
  if (floor_sum > cutoff) return out;

  std::array<int, 3> bound{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    const double rest = cutoff - (floor_sum - wave[a] * wave[a]);
    bound[a] = static_cast<int>(std::floor(std::sqrt(rest) / wave[a])) + 1;
  }
  const int b1 = d > 1 ? bound[1] : 1;
  const int b2 = d > 2 ? bound[2] : 1;
  for (int i = 1; i <= bound[0]; ++i) {
    for (int j = 1; j <= b1; ++j) {
      for (int k = 1; k <= b2; ++k) {
        double lambda = 0.0;
        const int idx[3] = {i, j, k};
        for (int a = 0; a < d; ++a) {
          const double w = wave[a] * idx[a];
          lambda += w * w;
        }
        if (lambda <= cutoff) {
          out.push_back({lambda, {i, d > 1 ? j : 0, d > 2 ? k : 0}});
        }
      }
    }
  }
  return out;
}

}  // namespace

Spectrum build_spectrum(const Domain& domain, std::size_t modes, int components) {
  if (modes == 0) throw InvalidInput("build_spectrum: mode count must be >= 1");
  if (components < 1) throw InvalidInput("build_spectrum: component count must be >= 1");

  double cutoff = 1.5 * weyl_estimate(domain, modes) + 2.0 * weyl_estimate(domain, 1);
  std::vector<Candidate> found = enumerate_below(domain, cutoff);
  while (found.size() < modes) {
    cutoff *= 2.0;
    found = enumerate_below(domain, cutoff);
  }
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.lambda, a.index) < std::tie(b.lambda, b.index);
  });

  Spectrum s;
  s.components = components;
  s.lambdas.reserve(modes);
  s.indices.reserve(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    s.lambdas.push_back(found[k].lambda);
    s.indices.push_back(found[k].index);
  }
  s.bold_lambdas.reserve(modes * static_cast<std::size_t>(components));
  for (double l : s.lambdas) {
    for (int r = 0; r < components; ++r) s.bold_lambdas.push_back(l);
  }
  return s;
}

double unit_ball_volume(int d) {
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double weyl_estimate(const Domain& domain, std::size_t n) {
  if (n == 0) throw InvalidInput("weyl_estimate: index must be >= 1");
  const int d = domain.dim();
  const double base = std::pow(2.0 * std::numbers::pi, d) / (unit_ball_volume(d) * domain.measure());
  return std::pow(base * static_cast<double>(n), 2.0 / d);
}

LiYauBound li_yau_lower(const Domain& domain, std::size_t n, int components) {
  if (domain.dim() != 2) {
    throw InvalidInput("li_yau_lower: only planar domains are supported (d = " +
                       std::to_string(domain.dim()) + ")");
  }
  if (components < 1) throw InvalidInput("li_yau_lower: component count must be >= 1");
  const double c = 2.0 * std::numbers::pi / (components * domain.measure());
  const double nn = static_cast<double>(n);
  return {c * nn * nn, c * nn};
}

}  // namespace wavedim
