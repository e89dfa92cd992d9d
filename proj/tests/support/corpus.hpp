#pragma once

// State corpora shared by the unit tests and the acceptance runner.

#include <cmath>
#include <string>
#include <vector>

#include "semiwig/states.hpp"

namespace semiwig::testing {

struct NamedState {
  std::string name;
  QuantumState state;
};

inline SpatialGrid corpus_grid() { return SpatialGrid::centered(128, 16.0); }
inline constexpr double kCorpusHbar = 0.5;

inline std::vector<NamedState> pure_corpus() {
  const auto g = corpus_grid();
  const double h = kCorpusHbar;
  std::vector<NamedState> out;
  auto add = [&](std::string n, WaveFunction w) { out.push_back({std::move(n), QuantumState(std::move(w))}); };
  add("coherent(0,0)", coherent_state(g, 0.0, 0.0, h));
  add("coherent(1,0.5)", coherent_state(g, 1.0, 0.5, h));
  add("coherent(-1,-1)", coherent_state(g, -1.0, -1.0, h));
  add("coherent(0.5,2)", coherent_state(g, 0.5, 2.0, h));
  add("wkb(x^2/4)", wkb_state(g, [](double x) { return std::exp(-x * x / 2); }, [](double x) { return x * x / 4; }, h));
  add("wkb(sin)", wkb_state(g, [](double x) { return std::exp(-x * x / 2) * (1.0 + 0.3 * std::cos(x)); },
                            [](double x) { return std::sin(x); }, h));
  add("wkb(cubic)", wkb_state(g, [](double x) { return std::exp(-(x - 0.5) * (x - 0.5) / 2); },
                              [](double x) { return 0.5 * x + 0.05 * x * x * x; }, h));
  auto bump = [](double z) { return std::exp(-z * z / 2); };
  add("scaled(0.3)", scaled_state(g, bump, 0.5, 0.3, h, 2.0));
  add("scaled(0.5)", scaled_state(g, bump, -0.5, 0.5, h, 2.0));
  add("scaled(0.7)", scaled_state(g, bump, 0.0, 0.7, h, 2.0));
  return out;
}

inline std::vector<NamedState> mixed_corpus() {
  const auto g = corpus_grid();
  const double h = kCorpusHbar;
  std::vector<NamedState> out;
  auto add = [&](std::string n, WaveFunction a, WaveFunction b, double w) {
    out.push_back({std::move(n), mixed_state({std::move(a), std::move(b)}, {1.0 - w, w})});
  };
  add("hermite(0,1)", harmonic_eigenstate(g, 0, h), harmonic_eigenstate(g, 1, h), 0.2);
  add("hermite(1,2)", harmonic_eigenstate(g, 1, h), harmonic_eigenstate(g, 2, h), 0.3);
  add("hermite(0,2)", harmonic_eigenstate(g, 0, h), harmonic_eigenstate(g, 2, h), 0.5);
  add("hermite(0,3)", harmonic_eigenstate(g, 0, h), harmonic_eigenstate(g, 3, h), 0.4);
  add("coherent(+-2)", coherent_state(g, -2.0, 0.0, h), coherent_state(g, 2.0, 0.0, h), 0.5);
  add("coherent(+-1.5,p)", coherent_state(g, -1.5, 0.5, h), coherent_state(g, 1.5, -0.5, h), 0.3);
  add("coherent(0,+-1)", coherent_state(g, 0.0, 1.0, h), coherent_state(g, 0.0, -1.0, h), 0.2);
  add("coherent(-1,1;1,-1)", coherent_state(g, -1.0, 1.0, h), coherent_state(g, 1.0, -1.0, h), 0.4);
  add("coherent+hermite", coherent_state(g, 1.0, 0.0, h), harmonic_eigenstate(g, 1, h), 0.25);
  add("wkb+coherent",
      wkb_state(g, [](double x) { return std::exp(-x * x / 2); }, [](double x) { return x * x / 4; }, h),
      coherent_state(g, 2.0, 1.0, h), 0.35);
  return out;
}

}  // namespace semiwig::testing
