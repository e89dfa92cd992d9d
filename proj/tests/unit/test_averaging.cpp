#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "semiwig/averaging.hpp"
#include "semiwig/error.hpp"
#include "semiwig/wigner.hpp"

using namespace semiwig;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gamma_k against quadrature") {
  boost::math::quadrature::exp_sinh<double> q;
  for (unsigned k = 0; k <= 6; ++k) {
    auto f = [k](double y) {
      if (y > 60.0) return 0.0;
      return std::pow(y, 2.0 * k + 1) * std::exp(-y * y / 2) / std::sqrt(2 * kPi) / (2.0 * k + 1);
    };
    CHECK(gamma_k(k) == Approx(q.integrate(f, 0.0, std::numeric_limits<double>::infinity())).epsilon(1e-12));
  }
}

TEST_CASE("Sobolev norms of a Gaussian") {
  const auto g = SpatialGrid::centered(256, 40.0);
  std::vector<double> f(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) f[i] = std::exp(-g.node(i) * g.node(i) / 2);
  boost::math::quadrature::sinh_sinh<double> q;
  for (double s : {0.25, 0.5, 1.0}) {
    // |f^(k)|^2 = 2 pi e^{-k^2}
    const double inhom = q.integrate([s](double k) { return std::pow(1 + k * k, s) * std::exp(-k * k); });
    CHECK(hs_norm(g, f, s) == Approx(std::sqrt(inhom)).epsilon(1e-10));
  }
  // |k|^{2s} is smooth at k = 0 only for integer s; the fractional cases converge like dk^{2s+1}.
  CHECK(homogeneous_hs_norm(g, f, 1.0) == Approx(std::sqrt(std::tgamma(1.5))).epsilon(1e-10));
  const auto wide = SpatialGrid::centered(4096, 640.0);
  std::vector<double> fw(wide.n());
  for (std::size_t i = 0; i < wide.n(); ++i) fw[i] = std::exp(-wide.node(i) * wide.node(i) / 2);
  CHECK(homogeneous_hs_norm(wide, fw, 0.5) == Approx(std::sqrt(std::tgamma(1.0))).epsilon(1e-4));
}

TEST_CASE("velocity averages with polynomial cutoffs give the moments") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto s = mixed_state({coherent_state(g, -1.0, 0.7, 0.5), harmonic_eigenstate(g, 1, 0.5)}, {0.5, 0.5});
  const auto w = wigner_transform(s);
  const auto mo = moments_from_state(s, 1.0);
  const auto a0 = velocity_average(w, Cutoff::unit());
  const auto a1 = velocity_average(w, Cutoff::monomial(1));
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(std::abs(a0[i] - mo.rho[i]) < 1e-12);
    CHECK(std::abs(a1[i] - mo.current[0][i]) < 1e-12);
  }
  const auto e = Cutoff::from_expression("exp(-xi^2/2)");
  const auto gc = Cutoff::gaussian(1.0);
  for (double xi : {-2.0, 0.0, 0.3}) CHECK(e(xi) == Approx(gc(xi)));
}

TEST_CASE("sweep guards") {
  CHECK_THROWS_AS(require_geometric({0.2, 0.1, 0.05}), InvalidSweep);
  CHECK_THROWS_AS(require_geometric({0.2, 0.1, 0.04, 0.02}), InvalidSweep);
  CHECK_NOTHROW(require_geometric({0.4, 0.2, 0.1, 0.05}));
}

TEST_CASE("pure families violate the Hilbert-Schmidt hypothesis under enforce") {
  const auto g = SpatialGrid::centered(256, 16.0);
  EvolutionConfig cfg;
  cfg.dt = 0.02;
  cfg.t_final = 0.2;
  std::vector<FamilyMember> fam;
  for (double h : {0.4, 0.2, 0.1, 0.05})
    fam.push_back(averaged_member(QuantumState(coherent_state(g, 0.0, 0.0, h)), Potential::soft_harmonic(), cfg,
                                  Cutoff::gaussian()));
  CHECK_THROWS_AS(check_uniform_bound(fam, 0.25, 0.0), HypothesisViolation);
  BoundOptions diag;
  diag.mode = HypothesisMode::diagnose;
  const auto r = check_uniform_bound(fam, 0.25, 0.0, diag);
  CHECK_FALSE(r.hypothesis_ok);
  CHECK(r.required_C == Approx(1.0 / std::sqrt(2 * kPi * 0.05)).epsilon(1e-8));
}

TEST_CASE("mollifier inequality on an exact instance") {
  // f = e^{-y^2/2} e^{-xi^2/8}, b_0 = xi d_y f, n = 0.
  const auto y = SpatialGrid::centered(256, 40.0);
  const FrequencyGrid xi(32, 0.5);
  Array2<cplx> f(xi.n(), y.n()), b0(xi.n(), y.n());
  for (std::size_t r = 0; r < xi.n(); ++r)
    for (std::size_t c = 0; c < y.n(); ++c) {
      const double yy = y.node(c), k = xi.frequency(r);
      f(r, c) = std::exp(-yy * yy / 2 - k * k / 8);
      b0(r, c) = k * (-yy) * f(r, c);
    }
  const auto rep = mollifier_machinery(f, {b0}, xi, y);
  CHECK(rep.rows.size() == xi.n() - 1);
  CHECK(rep.worst_ratio <= 1.0);
}

TEST_CASE("density bound: decomposition checks and the free case") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto k = kernel_from_state(QuantumState(coherent_state(g, 0.2, 0.9, 0.5)));
  const auto u = transport_source(k);
  CHECK(decomposition_residual(k, {u}) < 1e-12);
  const auto r = density_sobolev_1d(k, {u});
  CHECK(r.n == 0);
  CHECK(r.s == Approx(0.5));
  CHECK(r.trace == Approx(1.0).epsilon(1e-12));
  CHECK(r.pass);
  Array2<cplx> zero(u.rows, u.cols);
  CHECK_THROWS_AS(density_sobolev_1d(k, {zero}), InvalidDecomposition);
}

TEST_CASE("stationary sources reproduce the transport term") {
  const auto g = SpatialGrid::centered(128, 16.0);
  for (std::size_t n : {0u, 2u}) {
    const auto k = kernel_from_state(QuantumState(harmonic_eigenstate(g, n, 0.5)));
    const auto u = stationary_polynomial_sources(k, {0.0, 0.0, 0.5}, 1.0, 1);
    CHECK(decomposition_residual(k, u) < 1e-8);
    CHECK(density_sobolev_1d(k, u).pass);
  }
}
