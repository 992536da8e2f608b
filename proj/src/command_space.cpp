#include "hacl/command_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hacl/errors.hpp"

namespace hacl {
namespace {

constexpr const char* kAxisName[kAxes] = {"x", "y", "z"};

// Overlap tolerance for cell faces that coincide with the envelope edge up to
// rounding; such cells touch the box in a set of measure zero.
double face_tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

void check_index(BinId id, const CommandGrid& grid) {
  if (id.index >= grid.size()) {
    throw AddressError("bin index " + std::to_string(id.index) + " outside grid of " +
                       std::to_string(grid.size()) + " bins");
  }
}

}  // namespace

CommandGrid::CommandGrid() : CommandGrid({20, 10, 20}) {}

CommandGrid::CommandGrid(std::array<std::size_t, kAxes> axis_bins,
                         std::array<Interval, kAxes> axis_domain)
    : axis_bins_(axis_bins), axis_domain_(axis_domain) {
  for (std::size_t a = 0; a < kAxes; ++a) {
    if (axis_bins_[a] == 0) {
      throw ArgumentError(std::string("grid axis ") + kAxisName[a] + " needs at least one bin");
    }
    if (!(axis_domain_[a].lo < axis_domain_[a].hi)) {
      throw ArgumentError(std::string("grid axis ") + kAxisName[a] + " has an empty domain");
    }
  }
}

double CommandGrid::cell_width(std::size_t axis) const {
  return axis_domain_[axis].width() / static_cast<double>(axis_bins_[axis]);
}

void ActiveRange::validate() const {
  for (std::size_t a = 0; a < kAxes; ++a) {
    if (!(v_max[a] > 0.0) || !(v_max[a] <= cap[a])) {
      throw ArgumentError(std::string("active range: need 0 < v_max <= cap on axis ") +
                          kAxisName[a]);
    }
    if (!(step[a] >= 0.0)) {
      throw ArgumentError(std::string("active range: negative step on axis ") + kAxisName[a]);
    }
  }
}

BinId linear_index(const BinCoords& c, const CommandGrid& grid) {
  if (c.ix >= grid.bins(0) || c.iy >= grid.bins(1) || c.iz >= grid.bins(2)) {
    throw AddressError("bin coordinates (" + std::to_string(c.ix) + ", " + std::to_string(c.iy) +
                       ", " + std::to_string(c.iz) + ") outside grid");
  }
  return BinId{c.ix * (grid.bins(1) * grid.bins(2)) + c.iy * grid.bins(2) + c.iz};
}

BinCoords coords_of(BinId id, const CommandGrid& grid) {
  check_index(id, grid);
  const std::size_t plane = grid.bins(1) * grid.bins(2);
  return BinCoords{id.index / plane, (id.index % plane) / grid.bins(2), id.index % grid.bins(2)};
}

Box bin_cell(BinId id, const CommandGrid& grid) {
  const BinCoords c = coords_of(id, grid);
  const std::array<std::size_t, kAxes> idx{c.ix, c.iy, c.iz};
  Box box;
  for (std::size_t a = 0; a < kAxes; ++a) {
    const double lo = grid.domain(a).lo;
    const double w = grid.cell_width(a);
    box[a] = Interval{lo + static_cast<double>(idx[a]) * w,
                      lo + static_cast<double>(idx[a] + 1) * w};
  }
  return box;
}

Box physical_cell(BinId id, const CommandGrid& grid, const Vec3& scale) {
  Box box = bin_cell(id, grid);
  for (std::size_t a = 0; a < kAxes; ++a) {
    const Interval& d = grid.domain(a);
    auto map = [&](double x) { return scale[a] * (2.0 * (x - d.lo) / d.width() - 1.0); };
    box[a] = Interval{map(box[a].lo), map(box[a].hi)};
  }
  return box;
}

std::vector<double> one_hot(BinId id, const CommandGrid& grid) {
  check_index(id, grid);
  std::vector<double> x(grid.size(), 0.0);
  x[id.index] = 1.0;
  return x;
}

ActiveRange expand_range(const ActiveRange& range, bool success) {
  ActiveRange next = range;
  if (!success) return next;
  for (std::size_t a = 0; a < kAxes; ++a) {
    next.v_max[a] = std::min(range.v_max[a] + range.step[a], range.cap[a]);
  }
  return next;
}

std::vector<BinId> bins_in_range(const CommandGrid& grid, const ActiveRange& range,
                                 const Vec3& scale) {
  // Axes are independent, so the active set is a product of per-axis index sets.
  std::array<std::vector<std::size_t>, kAxes> keep;
  for (std::size_t a = 0; a < kAxes; ++a) {
    const double v = range.v_max[a];
    const double tol = face_tolerance(v);
    const Interval& d = grid.domain(a);
    const double w = grid.cell_width(a);
    for (std::size_t i = 0; i < grid.bins(a); ++i) {
      auto map = [&](double x) { return scale[a] * (2.0 * (x - d.lo) / d.width() - 1.0); };
      const double lo = map(d.lo + static_cast<double>(i) * w);
      const double hi = map(d.lo + static_cast<double>(i + 1) * w);
      if (lo < v - tol && hi > -v + tol) keep[a].push_back(i);
    }
  }
  std::vector<BinId> out;
  out.reserve(keep[0].size() * keep[1].size() * keep[2].size());
  for (std::size_t ix : keep[0])
    for (std::size_t iy : keep[1])
      for (std::size_t iz : keep[2]) out.push_back(linear_index({ix, iy, iz}, grid));
  if (out.empty()) throw ConfigurationError("active range selects no bins");
  return out;
}

std::vector<BinId> bins_in_range(const CommandGrid& grid, const ActiveRange& range) {
  return bins_in_range(grid, range, range.cap);
}

Box sampling_box(BinId id, const CommandGrid& grid, const ActiveRange& range) {
  Box box = physical_cell(id, grid, range.cap);
  for (std::size_t a = 0; a < kAxes; ++a) {
    const double v = range.v_max[a];
    const double lo = std::max(box[a].lo, -v);
    const double hi = std::min(box[a].hi, v);
    if (hi < lo - face_tolerance(v)) {
      throw NumericError("bin " + std::to_string(id.index) +
                         " does not intersect the active range on axis " + kAxisName[a]);
    }
    box[a] = hi > lo ? Interval{lo, hi} : Interval{hi, hi};
  }
  return box;
}

Command sample_command(BinId id, const CommandGrid& grid, const ActiveRange& range, Rng& rng) {
  const Box box = sampling_box(id, grid, range);
  Command c;
  c.v_x = uniform(rng, box[0].lo, box[0].hi);
  c.v_y = uniform(rng, box[1].lo, box[1].hi);
  c.omega_z = uniform(rng, box[2].lo, box[2].hi);
  return c;
}

}  // namespace hacl
