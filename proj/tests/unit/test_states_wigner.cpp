#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "corpus.hpp"
#include "semiwig/error.hpp"
#include "semiwig/states.hpp"
#include "semiwig/wigner.hpp"

using namespace semiwig;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("coherent state samples the analytic packet") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const double h = 0.5, q = 0.4, p = 1.1;
  const auto psi = coherent_state(g, q, p, h);
  CHECK(l2_norm(g, psi.samples()) == Approx(1.0).epsilon(1e-12));
  for (std::size_t j = 0; j < g.n(); j += 7) {
    const double x = g.node(j);
    const cplx ref = std::pow(kPi * h, -0.25) * std::exp(-(x - q) * (x - q) / (2 * h)) *
                     std::polar(1.0, p * (x - q / 2) / h);
    CHECK(std::abs(psi.samples()[j] - ref) < 1e-12);
  }
}

TEST_CASE("hermite functions are orthonormal and diagonalize the grid Hamiltonian") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const double h = 0.5;
  std::vector<WaveFunction> hs;
  for (std::size_t n = 0; n < 5; ++n) hs.push_back(harmonic_eigenstate(g, n, h));
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b)
      CHECK(std::abs(inner_product(g, hs[a].samples(), hs[b].samples()) - (a == b ? 1.0 : 0.0)) < 1e-10);
  const auto eig = stationary_states(g, Potential::harmonic(1.0, 1.0), h, 1.0, 5);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(eig.energies[n] == Approx(h * (n + 0.5)).epsilon(1e-10));
    CHECK(std::abs(std::abs(inner_product(g, eig.states[n].samples(), hs[n].samples())) - 1.0) < 1e-8);
  }
}

TEST_CASE("state constructors reject bad input") {
  const auto g = SpatialGrid::centered(64, 16.0);
  CHECK_THROWS_AS(coherent_state(g, 0.0, 0.0, -1.0), Error);
  CHECK_THROWS_AS(scaled_state(g, [](double z) { return std::exp(-z * z); }, 0.0, 0.9, 0.01), ResolutionError);
  const auto a = coherent_state(g, 0.0, 0.0, 0.5);
  CHECK_THROWS_AS(QuantumState({0.5, 0.6}, {a, harmonic_eigenstate(g, 1, 0.5)}), Error);
  CHECK_THROWS_AS(QuantumState({0.5, 0.5}, {a, a}), Error);
}

TEST_CASE("mixed_state orthonormalizes and keeps the trace") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto s = mixed_state({coherent_state(g, -1.0, 0.0, 0.5), coherent_state(g, 1.0, 0.0, 0.5)}, {0.7, 0.3});
  double mass = 0.0;
  for (double r : s.density()) mass += r * g.spacing();
  CHECK(mass == Approx(1.0).epsilon(1e-12));
  CHECK(hilbert_schmidt_trace(s) == Approx(0.7 * 0.7 + 0.3 * 0.3).epsilon(1e-12));
}

TEST_CASE("Wigner functions of Hermite states match the Laguerre closed form") {
  // W_n(x, xi) = (-1)^n / (pi hbar) e^{-2H/hbar} L_n(4H/hbar), H = (x^2 + xi^2)/2.
  const auto g = SpatialGrid::centered(128, 16.0);
  const double h = 0.5;
  for (unsigned n : {0u, 1u, 3u}) {
    const auto w = wigner_transform(QuantumState(harmonic_eigenstate(g, n, h)));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n(); i += 3)
      for (std::size_t c = 0; c < w.grid.xigrid.n(); c += 3) {
        const double x = g.node(i), xi = w.grid.xigrid.frequency(c);
        const double H = (x * x + xi * xi) / 2;
        const double ref = (n % 2 ? -1.0 : 1.0) / (kPi * h) * std::exp(-2 * H / h) * std::laguerre(n, 4 * H / h);
        worst = std::max(worst, std::abs(w.values(i, c) - ref));
      }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("marginal and moments of a coherent state") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const double h = 0.5, q = -0.5, p = 0.8, m = 2.0;
  const auto s = QuantumState(coherent_state(g, q, p, h));
  const auto w = wigner_transform(s);
  const auto mo = moments(w, m);
  const auto rho = s.density();
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(std::abs(mo.rho[i] - rho[i]) < 1e-12);
    CHECK(std::abs(mo.current[0][i] - rho[i] * p / m) < 1e-12);
    // E = (xi^2 / 2m) averaged: rho (p^2 + hbar/2) / 2m for the coherent packet.
    CHECK(std::abs(mo.energy[i] - rho[i] * (p * p + h / 2) / (2 * m)) < 1e-10);
  }
  const auto direct = moments_from_state(s, m);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(std::abs(direct.current[0][i] - mo.current[0][i]) < 1e-12);
  CHECK(total_mass(w) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("L2 identity holds for every corpus state") {
  for (const auto& ns : testing::pure_corpus()) CHECK(l2_identity_check(ns.state).relative_gap < 1e-10);
  for (const auto& ns : testing::mixed_corpus()) CHECK(l2_identity_check(ns.state).relative_gap < 1e-10);
}

TEST_CASE("property: kernel round trip and Hermitian symmetry on random mixtures") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2.0, 2.0), W(0.1, 0.9);
  const auto g = SpatialGrid::centered(64, 12.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double w = W(rng);
    const auto s = mixed_state({coherent_state(g, U(rng), U(rng), 0.6), coherent_state(g, U(rng), U(rng), 0.6)},
                               {1 - w, w});
    const auto k = kernel_from_state(s);
    CHECK(hermitian_defect(k) < 1e-12);
    const auto back = kernel_from_wigner(wigner_from_kernel(k));
    // Column 0 (y = -Y) has no mirror partner on an even grid and is excluded.
    double worst = 0.0;
    for (std::size_t i = 0; i < k.values.rows; ++i)
      for (std::size_t c = 1; c < k.values.cols; ++c)
        worst = std::max(worst, std::abs(back.values(i, c) - k.values(i, c)));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("tightness flags a family that oscillates at scale 1/hbar") {
  const auto g = SpatialGrid::centered(512, 16.0);
  std::vector<QuantumState> tight, fast;
  for (double h : {0.2, 0.1, 0.05}) {
    tight.push_back(QuantumState(coherent_state(g, 0.0, 1.0, h)));
    fast.push_back(QuantumState(coherent_state(g, 0.0, 0.15 / h, h)));
  }
  CHECK(tightness_and_oscillation(tight, 0.5).hbar_oscillatory);
  CHECK_FALSE(tightness_and_oscillation(fast, 0.5).hbar_oscillatory);
}
