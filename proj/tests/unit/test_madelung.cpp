#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semiwig/error.hpp"
#include "semiwig/evolution.hpp"
#include "semiwig/madelung.hpp"

using namespace semiwig;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

TEST_CASE("uniform flow is a steady state") {
  const auto g = SpatialGrid::centered(64, 2 * kPi);
  FluidState f{Box(g), std::vector<double>(g.n(), 1.0 / (2 * kPi)), {std::vector<double>(g.n(), 0.7)}, 0.0, 1.0, 1.0};
  const auto r = madelung_rhs(f, Potential::zero(), 1e-12);
  CHECK(max_abs(r.drho) < 1e-14);
  CHECK(max_abs(r.du[0]) < 1e-14);
}

TEST_CASE("a potential equal to minus the Bohm potential holds the fluid at rest") {
  // rho = e^{a cos x}: Lap sqrt(rho) / sqrt(rho) = (a/2)^2 sin^2 x - (a/2) cos x.
  const auto g = SpatialGrid::centered(64, 2 * kPi);
  const double a = 0.8, h = 0.6, m = 1.0;
  std::vector<double> rho(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) rho[i] = std::exp(a * std::cos(g.node(i)));
  FluidState f{Box(g), rho, {std::vector<double>(g.n(), 0.0)}, 0.0, h, m};
  const auto v = Potential::from_expression("(hbar^2/2) * (0.16*sin(x)^2 - 0.4*cos(x))", h);
  const auto r = madelung_rhs(f, v, 1e-12);
  CHECK(max_abs(r.drho) < 1e-13);
  CHECK(max_abs(r.du[0]) < 1e-12);
}

TEST_CASE("fluid moments of a moving packet") {
  const auto g = SpatialGrid::centered(128, 6.0);
  const double p = 2 * kPi / 6.0;
  const auto f = fluid_from_wave(periodic_coherent_state(g, 0.0, p, 1.0), 2.0);
  CHECK(f.mass() == Approx(1.0).epsilon(1e-12));
  // J / rho amplifies spectral round-off by 1 / min rho ~ 1e4 here.
  for (double u : f.u[0]) CHECK(std::abs(u - p / 2.0) < 1e-7);
  CHECK_THROWS_AS(periodic_coherent_state(g, 0.0, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("Madelung evolution tracks Schroedinger for a smooth periodic packet") {
  const auto g = SpatialGrid::centered(128, 6.0);
  const auto psi = periodic_coherent_state(g, 0.0, 2 * kPi / 6.0, 1.0);
  MadelungConfig mc;
  mc.dt = 2.5e-4;
  mc.t_final = 0.05;
  mc.record_stride = 50;
  const auto res = madelung_evolve(fluid_from_wave(psi), Potential::zero(), mc);
  REQUIRE(res.status == FluidStatus::completed);
  CHECK(res.mass_drift < 1e-10);
  EvolutionConfig ec;
  ec.dt = 2.5e-4;
  ec.t_final = 0.05;
  ec.record_stride = 50;
  ec.backend = Backend::schrodinger;
  const auto rows = compare_with_schrodinger(res.trajectory, schrodinger_evolve(psi, Potential::zero(), ec),
                                             Potential::zero());
  for (const auto& r : rows) {
    CHECK(r.rho_error < 1e-4);
    CHECK(r.u_error < 1e-4);
  }
  CHECK(std::isnan(rows.front().continuity));
  CHECK(comparison_csv(rows).rfind("t,L2_rho_err,L2_u_err,continuity_res,euler_res", 0) == 0);
}

TEST_CASE("vacuum and stability guards") {
  const auto g = SpatialGrid::centered(64, 2 * kPi);
  std::vector<double> rho(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) rho[i] = std::pow(std::sin(g.node(i) / 2), 2) / kPi;
  FluidState f{Box(g), rho, {std::vector<double>(g.n(), 0.0)}, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(madelung_rhs(f, Potential::zero(), 1e-6), VacuumError);
  MadelungConfig mc;
  mc.dt = 1e-3;
  mc.t_final = 0.01;
  const auto res = madelung_evolve(f, Potential::zero(), mc);
  CHECK(res.status == FluidStatus::vacuum);
  CHECK(std::string(to_string(res.status)) == "vacuum");

  FluidState smooth{Box(g), std::vector<double>(g.n(), 1.0 / (2 * kPi)), {std::vector<double>(g.n(), 0.0)}, 0.0, 1.0,
                    1.0};
  mc.dt = 0.5;
  mc.t_final = 1.0;
  CHECK_THROWS_AS(madelung_evolve(smooth, Potential::zero(), mc), StabilityError);
}

TEST_CASE("the two Euler forms coincide for positive densities") {
  const auto g = SpatialGrid::centered(128, 2 * kPi);
  std::vector<double> rho(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) rho[i] = std::exp(0.4 * std::cos(g.node(i)) - 0.2 * std::sin(2 * g.node(i)));
  CHECK(euler_forms_gap(g, rho) < 1e-10);
}

TEST_CASE("closure residuals vanish for a stationary state and are second order otherwise") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto v = Potential::harmonic(1.0, 1.0);
  EvolutionConfig ec;
  ec.dt = 1e-3;
  ec.t_final = 0.01;
  ec.backend = Backend::schrodinger;
  const auto still = closure_crosscheck(schrodinger_evolve(harmonic_eigenstate(g, 0, 1.0), v, ec), v);
  CHECK(still.max_continuity < 1e-8);
  CHECK(still.max_euler < 1e-6);
  CHECK(still.frames.size() == 9);
}
