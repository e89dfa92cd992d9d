#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "semiwig/purity.hpp"

using namespace semiwig;
using doctest::Approx;

TEST_CASE("spectral purity of kernels equals the sum of squared weights") {
  const auto g = SpatialGrid::centered(128, 16.0);
  for (double w : {0.0, 0.2, 0.5}) {
    const auto s = w == 0.0 ? QuantumState(harmonic_eigenstate(g, 1, 0.5))
                            : mixed_state({harmonic_eigenstate(g, 0, 0.5), harmonic_eigenstate(g, 1, 0.5)}, {1 - w, w});
    CHECK(spectral_purity(kernel_from_state(s)) == Approx((1 - w) * (1 - w) + w * w).epsilon(1e-10));
  }
}

TEST_CASE("corpus verdicts") {
  for (const auto& ns : testing::pure_corpus()) {
    INFO(ns.name);
    const auto r = tatarskii_residuals(ns.state);
    CHECK(r.verdict == Verdict::pure);
    CHECK(r.max_residual < 1e-6);
    CHECK(r.masked_fraction < 1.0);
  }
  for (const auto& ns : testing::mixed_corpus()) {
    INFO(ns.name);
    const auto r = tatarskii_residuals(ns.state);
    CHECK(r.verdict == Verdict::mixed);
    CHECK(r.max_residual > 1e-5);
  }
}

TEST_CASE("jets from states and from sampled kernels agree") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto s = QuantumState(coherent_state(g, 0.3, 0.6, 0.5));
  const auto a = kernel_jet(s);
  const auto b = kernel_jet(kernel_from_state(s));
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.fyy.size(); ++i) {
    scale = std::max(scale, std::abs(a.fyy.data[i]));
    worst = std::max(worst, std::abs(a.fyy.data[i] - b.fyy.data[i]));
  }
  CHECK(worst < 1e-8 * scale);
}

TEST_CASE("wave-form and closure identities on a pure state") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto s = QuantumState(harmonic_eigenstate(g, 0, 0.5));
  const auto jet = kernel_jet(s);
  CHECK(wave_form_residual_1d(jet).max_combined < 1e-8);
  CHECK(closure_residual(jet).max_residual < 1e-8);
  const auto tr = closure_trace(jet, 1.0);
  CHECK(tr.relative_l1 < 1e-8);
}

TEST_CASE("a tiny admixture is still detected") {
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto s = mixed_state({coherent_state(g, -1.0, 0.0, 0.5), coherent_state(g, 1.0, 0.0, 0.5)}, {0.99, 0.01});
  const auto r = tatarskii_residuals(s);
  CHECK(r.verdict == Verdict::mixed);
  CHECK(std::string(to_string(r.verdict)) == "mixed");
}
