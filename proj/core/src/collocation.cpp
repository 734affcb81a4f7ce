#include "wavedim/collocation.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "wavedim/error.hpp"

namespace wavedim {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Collocation::Batch {
  Eigen::Index columns = 0;
  double* buffer = nullptr;
  fftw_plan plan = nullptr;

  Batch(const std::array<int, 3>& n, int rank, std::size_t points, Eigen::Index cols) : columns(cols) {
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_real(points * static_cast<std::size_t>(cols));
    fftw_r2r_kind kinds[3] = {FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00};
    plan = fftw_plan_many_r2r(rank, n.data(), static_cast<int>(cols), buffer, nullptr, 1, static_cast<int>(points),
                              buffer, nullptr, 1, static_cast<int>(points), kinds, FFTW_ESTIMATE);
    if (plan == nullptr) {
      fftw_free(buffer);
      throw NumericFailure("FFTW could not create a sine-transform plan");
    }
  }
  ~Batch() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(buffer);
  }
  Batch(const Batch&) = delete;
  Batch& operator=(const Batch&) = delete;
};

Collocation::Collocation(const Domain& domain, const Spectrum& spectrum, std::array<int, 3> points_per_axis)
    : dim_(domain.dim()), modes_(spectrum.modes()) {
  points_ = 1;
  cell_volume_ = 1.0;
  double s_scale = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (a < dim_) {
      if (points_per_axis[a] < 1) throw InvalidInput("collocation grid needs at least one point per axis");
      per_axis_[a] = points_per_axis[a];
      lengths_[a] = domain.length(a);
      const double h = lengths_[a] / (per_axis_[a] + 1);
      cell_volume_ *= h;
      s_scale *= std::sqrt(2.0 / lengths_[a]) / 2.0;
      points_ *= static_cast<std::size_t>(per_axis_[a]);
    } else {
      per_axis_[a] = 1;
    }
  }
  synth_scale_ = s_scale;
  analyze_scale_ = cell_volume_ * s_scale;
  boundary_weight_ = domain.measure() - cell_volume_ * static_cast<double>(points_);

  offsets_.reserve(modes_);
  for (const ModeIndex& idx : spectrum.indices) {
    std::size_t off = 0;
    for (int a = 0; a < dim_; ++a) {
      if (idx[a] < 1 || idx[a] > per_axis_[a]) {
        throw InvalidInput("collocation grid too coarse for mode index " + std::to_string(idx[a]) + " on axis " +
                           std::to_string(a));
      }
      off = off * static_cast<std::size_t>(per_axis_[a]) + static_cast<std::size_t>(idx[a] - 1);
    }
    offsets_.push_back(off);
  }
}

Collocation::~Collocation() = default;
Collocation::Collocation(Collocation&&) noexcept = default;
Collocation& Collocation::operator=(Collocation&&) noexcept = default;

std::array<int, 3> Collocation::dealiased_points(const Spectrum& spectrum, int dim, int product_degree) {
  const int q = std::max(2, product_degree);
  std::array<int, 3> out{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    int top = 1;
    for (const ModeIndex& idx : spectrum.indices) top = std::max(top, idx[a]);
    // Mode m aliases onto 2(K+1) - m; keep every product mode up to q*top clear of
    // the retained band: 2(K+1) - q*top > top.
    const int needed = ((q + 1) * top) / 2 + 1;
    out[a] = std::max(needed, top);
  }
  return out;
}

double Collocation::coordinate(std::size_t p, int axis) const {
  std::size_t rest = p;
  std::array<std::size_t, 3> i{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    i[a] = rest % static_cast<std::size_t>(per_axis_[a]);
    rest /= static_cast<std::size_t>(per_axis_[a]);
  }
  return lengths_[axis] * static_cast<double>(i[axis] + 1) / (per_axis_[axis] + 1);
}

Collocation::Batch& Collocation::batch(Eigen::Index columns) {
  auto it = batches_.find(columns);
  if (it == batches_.end()) {
    it = batches_.emplace(columns, std::make_unique<Batch>(per_axis_, dim_, points_, columns)).first;
  }
  return *it->second;
}

void Collocation::synthesize(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, Eigen::MatrixXd& grid) {
  if (static_cast<std::size_t>(coeffs.rows()) != modes_) {
    throw InvalidInput("synthesize: coefficient rows (" + std::to_string(coeffs.rows()) +
                       ") do not match the mode count (" + std::to_string(modes_) + ")");
  }
  const Eigen::Index cols = coeffs.cols();
  grid.resize(static_cast<Eigen::Index>(points_), cols);
  if (cols == 0) return;
  Batch& b = batch(cols);
  Eigen::Map<Eigen::MatrixXd> buf(b.buffer, static_cast<Eigen::Index>(points_), cols);
  buf.setZero();
  for (std::size_t k = 0; k < modes_; ++k) {
    buf.row(static_cast<Eigen::Index>(offsets_[k])) = coeffs.row(static_cast<Eigen::Index>(k)) * synth_scale_;
  }
  fftw_execute(b.plan);
  grid = buf;
}

void Collocation::analyze(const Eigen::Ref<const Eigen::MatrixXd>& grid, Eigen::MatrixXd& coeffs) {
  if (static_cast<std::size_t>(grid.rows()) != points_) {
    throw InvalidInput("analyze: grid rows (" + std::to_string(grid.rows()) + ") do not match the point count (" +
                       std::to_string(points_) + ")");
  }
  const Eigen::Index cols = grid.cols();
  coeffs.resize(static_cast<Eigen::Index>(modes_), cols);
  if (cols == 0) return;
  Batch& b = batch(cols);
  Eigen::Map<Eigen::MatrixXd> buf(b.buffer, static_cast<Eigen::Index>(points_), cols);
  buf = grid;
  fftw_execute(b.plan);
  for (std::size_t k = 0; k < modes_; ++k) {
    coeffs.row(static_cast<Eigen::Index>(k)) = buf.row(static_cast<Eigen::Index>(offsets_[k])) * analyze_scale_;
  }
}

}  // namespace wavedim
