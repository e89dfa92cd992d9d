#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace semiwig {

/// Periodic uniform grid: nodes origin + j*spacing, j = 0..n-1.
class SpatialGrid {
 public:
  SpatialGrid(std::size_t n, double length, double origin);

  /// Grid on [-L/2, L/2).
  static SpatialGrid centered(std::size_t n, double length);

  std::size_t n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double origin() const noexcept { return origin_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double node(std::size_t j) const noexcept { return origin_ + static_cast<double>(j) * spacing(); }
  std::vector<double> nodes() const;
  bool is_centered() const noexcept;

  bool operator==(const SpatialGrid& o) const noexcept {
    return n_ == o.n_ && length_ == o.length_ && origin_ == o.origin_;
  }

 private:
  std::size_t n_;
  double length_;
  double origin_;
};

/// Angular wavenumbers (m - n/2) * 2pi/L for m = 0..n-1, i.e. k in [-n/2, n/2).
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t n, double spacing) : n_(n), spacing_(spacing) {}

  std::size_t n() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  double frequency(std::size_t m) const noexcept {
    return (static_cast<double>(m) - static_cast<double>(n_ / 2)) * spacing_;
  }
  double first() const noexcept { return frequency(0); }
  double nyquist() const noexcept { return static_cast<double>(n_ / 2) * spacing_; }
  std::vector<double> frequencies() const;

 private:
  std::size_t n_;
  double spacing_;
};

FrequencyGrid dual_grid(const SpatialGrid& g);

/// Grids for (x, y) and (x, xi). ygrid is centered so y = 0 sits at index n_y/2.
struct PhaseGrid {
  SpatialGrid xgrid;
  SpatialGrid ygrid;
  FrequencyGrid xigrid;

  PhaseGrid(const SpatialGrid& x, const SpatialGrid& y);

  /// y spacing dx/hbar so that x +- hbar*y/2 falls on the half-grid of x; n_y defaults to n_x.
  static PhaseGrid for_hbar(const SpatialGrid& x, double hbar, std::size_t ny = 0);

  std::size_t y_zero_index() const noexcept { return ygrid.n() / 2; }
};

/// Tensor product of one SpatialGrid per axis; samples stored row-major (axis 0 slowest).
struct Box {
  std::vector<SpatialGrid> axes;

  explicit Box(std::vector<SpatialGrid> a);
  Box(const SpatialGrid& g) : Box(std::vector<SpatialGrid>{g}) {}  // NOLINT

  std::size_t dim() const noexcept { return axes.size(); }
  std::size_t size() const noexcept;
  double cell_volume() const noexcept;
  std::vector<std::size_t> shape() const;
  /// Position of flat index along every axis.
  std::vector<double> point(std::size_t flat) const;

  bool operator==(const Box& o) const noexcept { return axes == o.axes; }
};

struct WeylPoint {
  double x;
  double y;
};

struct PositionPair {
  double X;
  double Y;
};

WeylPoint weyl_forward(double X, double Y, double hbar);
PositionPair weyl_inverse(double x, double y, double hbar);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace semiwig
