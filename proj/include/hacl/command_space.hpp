#pragma once

// Discretized (v_x, v_y, omega_z) command space: grid addressing, bin cells,
// one-hot encoding and the success-gated command envelope.
//
// Axis order is fixed as x = v_x, y = v_y, z = omega_z. Bins are addressed
// row-major with x outermost and z innermost; checkpoints persist these
// indices, so the layout must not change.

#include <array>
#include <compare>
#include <cstddef>
#include <vector>

#include "hacl/rng.hpp"

namespace hacl {

inline constexpr std::size_t kAxes = 3;
using Vec3 = std::array<double, kAxes>;

struct BinId {
  std::size_t index = 0;
  auto operator<=>(const BinId&) const = default;
};

struct BinCoords {
  std::size_t ix = 0;
  std::size_t iy = 0;
  std::size_t iz = 0;
  bool operator==(const BinCoords&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

using Box = std::array<Interval, kAxes>;

struct Command {
  double v_x = 0.0;
  double v_y = 0.0;
  double omega_z = 0.0;

  double operator[](std::size_t axis) const {
    return axis == 0 ? v_x : (axis == 1 ? v_y : omega_z);
  }
};

class CommandGrid {
 public:
  // Defaults: 20 x 10 x 20 bins over [-1, 1]^3.
  CommandGrid();
  CommandGrid(std::array<std::size_t, kAxes> axis_bins,
              std::array<Interval, kAxes> axis_domain = {Interval{-1, 1}, Interval{-1, 1},
                                                         Interval{-1, 1}});

  std::size_t bins(std::size_t axis) const { return axis_bins_[axis]; }
  const std::array<std::size_t, kAxes>& axis_bins() const { return axis_bins_; }
  const Interval& domain(std::size_t axis) const { return axis_domain_[axis]; }
  const std::array<Interval, kAxes>& axis_domain() const { return axis_domain_; }
  double cell_width(std::size_t axis) const;
  std::size_t size() const { return axis_bins_[0] * axis_bins_[1] * axis_bins_[2]; }

  bool operator==(const CommandGrid&) const = default;

 private:
  std::array<std::size_t, kAxes> axis_bins_;
  std::array<Interval, kAxes> axis_domain_;
};

// Symmetric command envelope [-v_max, v_max] per axis. The grid domain maps
// linearly onto [-cap, cap], so cap doubles as the normalized-to-physical scale.
struct ActiveRange {
  Vec3 v_max{1.0, 1.0, 1.0};
  Vec3 cap{7.0, 1.0, 5.0};
  Vec3 step{0.5, 0.5, 0.5};

  // Throws ArgumentError unless 0 < v_max <= cap and step >= 0 on every axis.
  void validate() const;
  bool operator==(const ActiveRange&) const = default;
};

BinId linear_index(const BinCoords& coords, const CommandGrid& grid);
BinCoords coords_of(BinId id, const CommandGrid& grid);

// Cell of a bin in normalized grid units.
Box bin_cell(BinId id, const CommandGrid& grid);
// Cell of a bin in physical units under the per-axis scale (domain -> [-scale, scale]).
Box physical_cell(BinId id, const CommandGrid& grid, const Vec3& scale);

std::vector<double> one_hot(BinId id, const CommandGrid& grid);

ActiveRange expand_range(const ActiveRange& range, bool success);

// Bins whose physical cell overlaps the +-v_max box with positive measure.
// Throws ConfigurationError if the result is empty.
std::vector<BinId> bins_in_range(const CommandGrid& grid, const ActiveRange& range,
                                 const Vec3& scale);
std::vector<BinId> bins_in_range(const CommandGrid& grid, const ActiveRange& range);

// Physical cell of `id` clipped to the active envelope. Throws NumericError
// when the two do not meet.
Box sampling_box(BinId id, const CommandGrid& grid, const ActiveRange& range);

// Uniform draw over sampling_box(id, grid, range).
Command sample_command(BinId id, const CommandGrid& grid, const ActiveRange& range, Rng& rng);

}  // namespace hacl
