#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "semiwig/fft.hpp"
#include "semiwig/fit.hpp"
#include "semiwig/grid.hpp"

using namespace semiwig;
using doctest::Approx;

TEST_CASE("centered grid and its dual") {
  const auto g = SpatialGrid::centered(64, 8.0);
  CHECK(g.node(0) == Approx(-4.0));
  CHECK(g.node(32) == Approx(0.0).epsilon(1e-15));
  CHECK(g.spacing() == Approx(0.125));
  const auto k = dual_grid(g);
  CHECK(k.n() == 64);
  CHECK(k.spacing() == Approx(2 * std::numbers::pi / 8.0));
  CHECK(k.frequency(32) == 0.0);
  CHECK(k.first() == Approx(-k.nyquist()));
}

TEST_CASE("box flattening is row major") {
  const Box b({SpatialGrid::centered(8, 4.0), SpatialGrid::centered(8, 2.0)});
  CHECK(b.size() == 64);
  CHECK(b.cell_volume() == Approx(0.125));
  const auto p = b.point(9);  // row 1, column 1
  CHECK(p[0] == Approx(-1.5));
  CHECK(p[1] == Approx(-0.75));
}

TEST_CASE("weyl variables round trip") {
  const auto w = weyl_forward(1.5, -0.5, 0.25);
  CHECK(w.x == Approx(0.5));
  CHECK(w.y == Approx(8.0));
  const auto p = weyl_inverse(w.x, w.y, 0.25);
  CHECK(p.X == Approx(1.5));
  CHECK(p.Y == Approx(-0.5));
}

TEST_CASE("forward transform of a Gaussian matches the continuous transform") {
  const auto g = SpatialGrid::centered(128, 20.0);
  std::vector<cplx> f(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = std::exp(-g.node(j) * g.node(j) / 2);
  const auto F = fft::forward(g, f);
  const auto k = dual_grid(g);
  for (std::size_t m = 0; m < g.n(); ++m) {
    const double kk = k.frequency(m);
    CHECK(std::abs(F[m] - std::sqrt(2 * std::numbers::pi) * std::exp(-kk * kk / 2)) < 1e-12);
  }
  const auto back = fft::inverse(g, F);
  for (std::size_t j = 0; j < g.n(); ++j) CHECK(std::abs(back[j] - f[j]) < 1e-14);
}

TEST_CASE("spectral derivatives of trigonometric polynomials are exact") {
  const auto g = SpatialGrid::centered(64, 2 * std::numbers::pi);
  std::vector<double> f(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = std::sin(3 * g.node(j)) + 0.5 * std::cos(g.node(j));
  const auto d1 = fft::derivative(g, std::span<const double>(f), 1);
  const auto d2 = fft::derivative(g, std::span<const double>(f), 2);
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.node(j);
    CHECK(d1[j] == Approx(3 * std::cos(3 * x) - 0.5 * std::sin(x)).epsilon(1e-12));
    CHECK(std::abs(d2[j] - (-9 * std::sin(3 * x) - 0.5 * std::cos(x))) < 1e-11);
  }
}

TEST_CASE("shifted interpolation is exact for band-limited data") {
  const auto g = SpatialGrid::centered(32, 2 * std::numbers::pi);
  std::vector<cplx> f(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) f[j] = std::polar(1.0, 2 * g.node(j)) + std::cos(5 * g.node(j));
  const auto spec = fft::spectrum_of(f);
  std::vector<cplx> out(g.n());
  fft::shifted_from_spectrum(g, spec, 0.3, out);
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.node(j) + 0.3;
    CHECK(std::abs(out[j] - (std::polar(1.0, 2 * x) + std::cos(5 * x))) < 1e-12);
  }
}

TEST_CASE("log-log fit recovers a power law") {
  std::vector<double> x{0.2, 0.1, 0.05, 0.025}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.75));
  const auto fit = fit_loglog(x, y);
  CHECK(fit.slope == Approx(0.75));
  CHECK(std::exp(fit.intercept) == Approx(3.0));
  CHECK(fit.residual < 1e-12);
}
