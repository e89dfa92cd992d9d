#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "semiwig/array.hpp"
#include "semiwig/wigner.hpp"

namespace semiwig {

enum class Verdict { pure, mixed, inconclusive };
const char* to_string(Verdict v) noexcept;

struct PurityOptions {
  double tau = 1e-6;             ///< smallness mask, relative to max |R~|
  double pure_tolerance = 1e-6;  ///< largest residual still called pure
};

/// R~ with its first and second x/y derivatives on one phase grid.
struct KernelJet {
  PhaseGrid grid;
  double hbar;
  Array2<cplx> f, fx, fy, fxx, fyy, fxy;
};

/// Derivatives by spectral differentiation of the sampled kernel.
KernelJet kernel_jet(const KernelField& k);
/// Derivatives assembled from spectral derivatives of the wave functions (exact bilinear forms).
KernelJet kernel_jet(const QuantumState& s, std::optional<PhaseGrid> grid = std::nullopt);

struct PurityReport {
  Array2<double> residual_grid;  ///< 0 on masked cells
  Array2<std::uint8_t> mask;     ///< 1 where |R~| > tau max |R~|
  double max_residual = 0.0;
  double masked_fraction = 0.0;  ///< masked share of the envelope support sqrt(rho(X) rho(Y)) > tau max
  double spectral_purity = 0.0;  ///< tr(R^2) / (tr R)^2
  Verdict verdict = Verdict::inconclusive;
};

/// (4/hbar^2) d_y(d_y F / F) - d_x(d_x F / F) on the unmasked set, divided by the local curvature
/// scale |(4/hbar^2) d_y(d_y F/F)| + |d_x(d_x F/F)| + (2pi/L)^2. In d = 1 the mixed identity holds
/// identically, so this is the whole family.
PurityReport tatarskii_residuals(const KernelJet& jet, const PurityOptions& opts = {});
PurityReport tatarskii_residuals(const KernelField& k, const PurityOptions& opts = {});
/// Uses the state's own derivatives and reports tr(R^2)/(tr R)^2 from its weights.
PurityReport tatarskii_residuals(const QuantumState& s, const PurityOptions& opts = {});

/// d'Alembert form (4/hbar^2) d_y^2 log R~ = d_x^2 log R~ split into the log-amplitude (real) and
/// phase (imaginary) parts; `combined` is their Euclidean norm with the same normalization as above.
struct WaveFormResidual {
  Array2<double> amplitude;
  Array2<double> phase;
  Array2<double> combined;
  Array2<std::uint8_t> inconclusive;  ///< cells the mask removed
  double max_combined = 0.0;
};
WaveFormResidual wave_form_residual_1d(const KernelJet& jet, const PurityOptions& opts = {});
WaveFormResidual wave_form_residual_1d(const KernelField& k, const PurityOptions& opts = {});

/// d_y^2 R~ - (d_y R~)^2 / R~ - (hbar^2/4) R~ d_x(d_x R~ / R~), relative to the sum of the term moduli.
struct ClosureResidual {
  Array2<double> residual;
  double max_residual = 0.0;
};
ClosureResidual closure_residual(const KernelJet& jet, const PurityOptions& opts = {});

/// The closure identity on the diagonal y = 0: lhs = 2m rho E - m^2 J^2 from y-derivatives of R~,
/// rhs = -(hbar^2/8) (rho^2)'' + (hbar^2/2) (rho')^2 from rho alone.
struct ClosureTrace {
  std::vector<double> lhs;
  std::vector<double> rhs;
  double relative_l1 = 0.0;  ///< ||lhs - rhs||_1 / ||rhs||_1
};
ClosureTrace closure_trace(const KernelJet& jet, double m);

/// hbar sum |R~|^2 dx dy / (sum R~(x,0) dx)^2.
double spectral_purity(const KernelField& k);

}  // namespace semiwig
