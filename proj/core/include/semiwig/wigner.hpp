#pragma once

#include <optional>
#include <vector>

#include "semiwig/array.hpp"
#include "semiwig/grid.hpp"
#include "semiwig/states.hpp"

namespace semiwig {

/// R~(x, y) = R(x + hbar y/2, x - hbar y/2); rows index x, columns index y.
struct KernelField {
  PhaseGrid grid;
  double hbar;
  Array2<cplx> values;
};

/// Real W(x, xi); rows index x, columns index xi.
struct WignerField {
  PhaseGrid grid;
  double hbar;
  Array2<double> values;
  double max_imag = 0.0;  ///< imaginary residue discarded by the transform
};

/// rho, J (one array per axis), kinetic energy density on a box.
struct MomentFields {
  Box box;
  double mass;
  std::vector<double> rho;
  std::vector<std::vector<double>> current;
  std::vector<double> energy;
  std::optional<bool> rank_one;  ///< known when built from a QuantumState
};

/// Kernel of a state on `grid` (default PhaseGrid::for_hbar on the state's grid).
/// Off-grid values psi(x +- hbar y/2) use band-limited interpolation.
KernelField kernel_from_state(const QuantumState& s, std::optional<PhaseGrid> grid = std::nullopt);

/// sum_j lambda_j psi_j^(a)(x + hbar y/2) conj(psi_j^(b)(x - hbar y/2)): the building block of
/// exact x and y derivatives of R~ from spectral derivatives of the wave functions.
KernelField derivative_kernel(const QuantumState& s, int a, int b, std::optional<PhaseGrid> grid = std::nullopt);

/// W = (2 pi)^{-1} F_{y->xi} R~. Throws InconsistencyError if Hermitian symmetry fails above 1e-6.
WignerField wigner_from_kernel(const KernelField& k);
/// R~ = 2 pi F^{-1}_{xi->y} W.
KernelField kernel_from_wigner(const WignerField& w);

WignerField wigner_transform(const QuantumState& s, std::optional<PhaseGrid> grid = std::nullopt);

/// Largest |R~(x,-y) - conj R~(x,y)| relative to max |R~|.
double hermitian_defect(const KernelField& k);

/// rho, J, E by xi-quadrature of W, cross-checked against spectral y-derivatives of R~ at y = 0.
/// Throws InconsistencyError when the two disagree beyond 1e-8 (relative to field scale).
MomentFields moments(const WignerField& w, double m);
/// The y-derivative route alone: rho = R~(x,0), J = -(i/m) d_y R~, E = -(1/2m) d_y^2 R~ at y = 0.
MomentFields moments_from_kernel(const KernelField& k, double m);
/// Moments directly from the wave functions (any dimension).
MomentFields moments_from_state(const QuantumState& s, double m);

/// Total mass sum W dx dxi.
double total_mass(const WignerField& w);
/// Discrete L2 norm squared sum |W|^2 dx dxi.
double l2_norm_squared(const WignerField& w);

/// rho^(Xi) = sum_j lambda_j |F[psi_j](Xi)|^2 on the dual grid of every axis (natural order).
std::vector<double> rho_hat(const QuantumState& s);

struct L2Identity {
  double lhs;  ///< ||W||^2
  double rhs;  ///< (2 pi hbar)^{-d} tr(R^2)
  double relative_gap;
};
L2Identity l2_identity_check(const QuantumState& s);

struct TailMasses {
  double hbar;
  double radius;
  double spatial_tail;   ///< integral of rho over |x| > R
  double momentum_tail;  ///< integral of hbar^{-d} rho^(xi/hbar) over |xi| > R
  double kinetic_energy; ///< integral of E (mass m)
};
struct TightnessReport {
  std::vector<TailMasses> rows;
  bool spatially_tight;
  bool hbar_oscillatory;
};
/// Tail masses at radii R, 2R, 4R for every member; a family is flagged when its worst tail at 4R
/// is not below half its worst tail at R.
TightnessReport tightness_and_oscillation(const std::vector<QuantumState>& family, double R, double m = 1.0);

}  // namespace semiwig
