#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include "corpus.hpp"
#include "semiwig/error.hpp"
#include "semiwig/semiclassics.hpp"

using namespace semiwig;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> random_density(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> a, ph;
  for (int k = 0; k < 6; ++k) {
    a.push_back(0.3 * U(rng));
    ph.push_back(kPi * U(rng));
  }
  std::vector<double> rho(box.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const auto x = box.point(i);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += a[k] * std::cos((k + 1) * x[0] + ph[k]);
    if (box.dim() > 1)
      for (int k = 3; k < 6; ++k) s += a[k] * std::cos((k - 2) * x[1] + ph[k]);
    rho[i] = std::exp(s);
  }
  return rho;
}
}  // namespace

TEST_CASE("coherent d = 1 gradient energy against quadrature of the closed-form density") {
  const auto g = SpatialGrid::centered(1024, 16.0);
  const std::vector<double> hbars{0.2, 0.1, 0.05, 0.025};
  const auto rep = concentration_sweep([&](double h) { return coherent_state(g, 0.0, 0.5, h); }, hbars);
  boost::math::quadrature::sinh_sinh<double> q;
  for (const auto& row : rep.rows) {
    const double h = row.hbar;
    const double ref = h * h * q.integrate([h](double x) {
      const double rho = std::exp(-x * x / h) / std::sqrt(kPi * h);
      const double d = -2 * x / h * rho;
      return d * d;
    });
    CHECK(row.grad_rho_sq == Approx(ref).epsilon(1e-9));
    CHECK(row.grad_rho_sq == Approx(std::sqrt(h / (2 * kPi))).epsilon(1e-9));
  }
  CHECK(rep.fits[0].grad_rho_sq.slope == Approx(0.5).epsilon(1e-6));
  CHECK(rep.fits[0].equivalence_holds);
  CHECK(sweep_csv(rep).rfind("hbar,t,", 0) == 0);
}

TEST_CASE("property: pointwise pressure identities on random positive densities") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const auto g = SpatialGrid::centered(trial % 3 == 2 ? 64 : 128, 2 * kPi);
    const Box box = trial % 3 == 2 ? Box({g, g}) : Box(g);
    const auto rho = random_density(box, rng);
    const auto r = pressure_identity_check(box, rho, 0.4, 1.3);
    CHECK(r.bohm_form < 1e-10);
    CHECK(r.pressure_form < 1e-10);
    CHECK(r.link < 1e-10);
    CHECK(r.integrated_bohm_form < 1e-10);
    CHECK(r.integrated_pressure_form < 1e-10);
    CHECK(r.pointwise_bohm_variant > 1e-3);
  }
}

TEST_CASE("Bohm potential and pressure trace agree with the square-root form") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const double h = 0.7, m = 1.5;
  std::vector<double> rho(g.n()), sq(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    rho[i] = std::exp(-g.node(i) * g.node(i));
    sq[i] = std::sqrt(rho[i]);
  }
  const auto P = bohm_potential(g, rho, h, m);
  const auto pi = pressure_tensor(g, rho, h, m);
  for (std::size_t i = 40; i < 88; ++i) {
    const double x = g.node(i);
    // sqrt(rho) = e^{-x^2/2}: Lap sqrt / sqrt = x^2 - 1; Pi = -(h^2/4m) (log rho)'' = h^2 / 2m.
    CHECK(P.values[i] == Approx(-h * h / (2 * m) * (x * x - 1)).epsilon(1e-9));
    CHECK(pi[0].values[i] == Approx(h * h / (2 * m)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(pressure_identity_check(g, std::vector<double>(g.n(), 0.0), h, m), InvalidParameter);
}

TEST_CASE("monokinetic identity holds for pure states and is skipped for mixtures") {
  for (const auto& ns : testing::pure_corpus()) {
    INFO(ns.name);
    const auto d = monokinetic_defect(moments_from_state(ns.state, 1.0), ns.state.hbar());
    CHECK(d.applicable);
    CHECK(d.relative_l1 < 1e-8);
  }
  const auto mixed = testing::mixed_corpus().front().state;
  CHECK_FALSE(monokinetic_defect(moments_from_state(mixed, 1.0), mixed.hbar()).applicable);
}

TEST_CASE("velocity of a coherent state is p / m") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto u = velocity_field(moments_from_state(QuantumState(coherent_state(g, 0.0, 0.8, 0.5)), 2.0));
  for (std::size_t i = 48; i < 80; ++i) CHECK(u[0][i] == Approx(0.4).epsilon(1e-10));
}

TEST_CASE("bump window") {
  const auto g = SpatialGrid::centered(256, 10.0);
  const auto w = bump_window(g, 4.0);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double r = std::abs(g.node(i));
    if (r <= 3.6) CHECK(w[i] == 1.0);
    if (r >= 4.0) CHECK(w[i] == 0.0);
    CHECK(w[i] >= 0.0);
    CHECK(w[i] <= 1.0);
  }
}
