#include "semiwig/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "semiwig/error.hpp"

namespace semiwig {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

SpatialGrid::SpatialGrid(std::size_t n, double length, double origin)
    : n_(n), length_(length), origin_(origin) {
  if (n < 8 || !is_power_of_two(n))
    throw InvalidParameter("grid point count must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidParameter("grid length must be positive and finite");
  if (!std::isfinite(origin)) throw InvalidParameter("grid origin must be finite");
}

SpatialGrid SpatialGrid::centered(std::size_t n, double length) {
  return SpatialGrid(n, length, -0.5 * length);
}

std::vector<double> SpatialGrid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = node(j);
  return out;
}

bool SpatialGrid::is_centered() const noexcept {
  return std::abs(origin_ + 0.5 * length_) <= 1e-12 * length_;
}

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> out(n_);
  for (std::size_t m = 0; m < n_; ++m) out[m] = frequency(m);
  return out;
}

FrequencyGrid dual_grid(const SpatialGrid& g) {
  return FrequencyGrid(g.n(), 2.0 * std::numbers::pi / g.length());
}

PhaseGrid::PhaseGrid(const SpatialGrid& x, const SpatialGrid& y)
    : xgrid(x), ygrid(y), xigrid(dual_grid(y)) {
  if (!y.is_centered()) throw InvalidParameter("y grid must be centered on y = 0");
}

PhaseGrid PhaseGrid::for_hbar(const SpatialGrid& x, double hbar, std::size_t ny) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  if (ny == 0) ny = x.n();
  const double dy = x.spacing() / hbar;
  return PhaseGrid(x, SpatialGrid::centered(ny, dy * static_cast<double>(ny)));
}

Box::Box(std::vector<SpatialGrid> a) : axes(std::move(a)) {
  if (axes.empty() || axes.size() > 3) throw InvalidParameter("box dimension must be 1, 2 or 3");
}

std::size_t Box::size() const noexcept {
  std::size_t s = 1;
  for (const auto& g : axes) s *= g.n();
  return s;
}

double Box::cell_volume() const noexcept {
  double v = 1.0;
  for (const auto& g : axes) v *= g.spacing();
  return v;
}

std::vector<std::size_t> Box::shape() const {
  std::vector<std::size_t> s;
  for (const auto& g : axes) s.push_back(g.n());
  return s;
}

std::vector<double> Box::point(std::size_t flat) const {
  std::vector<double> p(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const std::size_t n = axes[a].n();
    p[a] = axes[a].node(flat % n);
    flat /= n;
  }
  return p;
}

WeylPoint weyl_forward(double X, double Y, double hbar) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  return {0.5 * (X + Y), (X - Y) / hbar};
}

PositionPair weyl_inverse(double x, double y, double hbar) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  return {x + 0.5 * hbar * y, x - 0.5 * hbar * y};
}

}  // namespace semiwig
