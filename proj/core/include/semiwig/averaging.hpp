#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semiwig/array.hpp"
#include "semiwig/evolution.hpp"
#include "semiwig/fit.hpp"
#include "semiwig/grid.hpp"
#include "semiwig/wigner.hpp"

namespace semiwig {

/// Weight psi(xi) applied before integrating W over xi.
struct Cutoff {
  std::function<double(double)> fn;
  bool untruncated = false;  ///< psi == 1: the average is the full density
  std::string description;

  double operator()(double xi) const { return fn(xi); }

  /// e^{-xi^2 / (2 width^2)}.
  static Cutoff gaussian(double width = 1.0);
  static Cutoff unit();
  /// xi^power.
  static Cutoff monomial(int power);
  /// Expression in the variable `xi`.
  static Cutoff from_expression(const std::string& text);
};

/// Real samples over a uniform (t, x) grid; rows index t.
struct SpaceTimeField {
  std::vector<double> times;
  SpatialGrid xgrid;
  Array2<double> values;
  bool untruncated = false;

  double time_step() const { return times.size() > 1 ? times[1] - times[0] : 1.0; }
};

/// rho_psi(x) = sum_xi W(x, xi) psi(xi) dxi. Throws ResolutionError when psi varies too fast
/// for the xi spacing (midpoint linear-interpolation error above 1e-2 of max |psi|).
std::vector<double> velocity_average(const WignerField& w, const Cutoff& psi);
SpaceTimeField velocity_average(const Trajectory<WignerField>& traj, const Cutoff& psi);

/// Discrete H^s norm on the periodic (t, x) torus after a cosine taper of `taper` (fraction of
/// each axis rolled off at both ends): (sum (1 + tau^2 + kappa^2)^s |f^|^2 dtau dkappa / (2pi)^2)^{1/2}.
/// A field with one time row is treated as static (x only).
double hs_norm(const SpaceTimeField& f, double s, double taper = 0.1);
/// The same norm for a static profile on a grid, untapered.
double hs_norm(const SpatialGrid& g, const std::vector<double>& f, double s);
/// Homogeneous norm (sum |kappa|^{2s} |f^|^2 dkappa / 2pi)^{1/2}, untapered.
double homogeneous_hs_norm(const SpatialGrid& g, const std::vector<double>& f, double s);

/// One leg of an hbar sweep: the averaged density of an evolved state and its tr(R^2).
struct FamilyMember {
  double hbar;
  double purity;   ///< tr(R^2)
  std::size_t dim = 1;
  SpaceTimeField field;
};

/// Evolves `s` and averages every frame with `psi`.
FamilyMember averaged_member(const QuantumState& s, const Potential& v, const EvolutionConfig& cfg,
                             const Cutoff& psi, std::optional<PhaseGrid> grid = std::nullopt);

enum class HypothesisMode { enforce, diagnose };

struct BoundOptions {
  double C = 1.0;  ///< tr(R^2) <= C^2 (2 pi hbar)^d
  HypothesisMode mode = HypothesisMode::enforce;
  double taper = 0.1;
  double bounded_slope = -0.05;
  double bounded_spread = 3.0;
  double growth_slope = -0.2;
};

struct SobolevRow {
  double hbar;
  double norm;      ///< ||rho_psi||_{H^s}
  double weighted;  ///< hbar^beta * norm
  double required_C;  ///< sqrt(tr(R^2) / (2 pi hbar)^d)
  bool hypothesis_ok;
};

struct SobolevReport {
  double s;
  double beta;
  std::vector<SobolevRow> rows;
  LineFit fit;       ///< log weighted against log hbar
  double spread;     ///< max/min of weighted
  double required_C; ///< largest row value
  bool hypothesis_ok;
  bool bounded;      ///< slope >= bounded_slope and spread < bounded_spread
  bool grows;        ///< slope <= growth_slope
};

/// hbar^beta ||rho_psi||_{H^s} across a geometric sweep (>= 4 legs). Members violating the
/// Hilbert-Schmidt scaling throw HypothesisViolation under HypothesisMode::enforce.
SobolevReport check_uniform_bound(const std::vector<FamilyMember>& family, double s, double beta,
                                  const BoundOptions& opts = {});

/// Checks that hbars form a geometric sequence of at least `min_points` entries; throws InvalidSweep.
void require_geometric(const std::vector<double>& hbars, std::size_t min_points = 4);

// ---- one-dimensional kernel estimates ----------------------------------------------------------

/// 2^k k! / ((2k + 1) sqrt(2 pi)).
double gamma_k(unsigned k);

struct MollifierRow {
  double xi;
  double epsilon;
  double lhs;  ///< |f(xi,0)|^2 / (n + 2)
  double rhs;
  double ratio;
};
struct MollifierReport {
  std::vector<MollifierRow> rows;  ///< every xi != 0
  double worst_ratio = 0.0;
};

/// Per-xi bound |f(xi,0)|^2/(n+2) <= eps/(2 sqrt pi) ||f(xi,.)||^2 + sum_k gamma_k eps^{-(2k+1)} |xi|^{-2} ||beta_k(xi,.)||^2_{(0,inf)}
/// with beta_k(xi,z) = b_k(xi,z) - (-1)^k b_k(xi,-z), eps^{2n+2} = |xi|^{-2} for |xi| >= 1 and eps = 1/|xi| otherwise.
/// Rows of f and b_k index xi on `xi`, columns index y on the centered grid `y`.
MollifierReport mollifier_machinery(const Array2<cplx>& f, const std::vector<Array2<cplx>>& b,
                                    const FrequencyGrid& xi, const SpatialGrid& y);

/// d_y(-i d_x) R~, spectrally.
Array2<cplx> transport_source(const KernelField& k);

/// Sources u_0..u_n of a stationary state of the polynomial potential V = sum_j c_j x^j:
/// d_y(-i d_x) R~ = m delta[V] R~ expanded in powers of y, powers above n folded into u_n.
std::vector<Array2<cplx>> stationary_polynomial_sources(const KernelField& k, const std::vector<double>& coeffs,
                                                        double m, std::size_t n);

/// Largest |d_y(-i d_x) R~ - sum u_k y^k| relative to max |d_y(-i d_x) R~|.
double decomposition_residual(const KernelField& k, const std::vector<Array2<cplx>>& u);

struct DensitySobolevReport {
  std::size_t n;
  double s;                 ///< 1 / (2(n+1))
  double lhs;               ///< ||rho||_{H^s}
  double rhs;               ///< square root of the assembled constant chain
  double ratio;             ///< lhs / rhs
  double trace;             ///< sum rho dx (tr|R| for R >= 0)
  double kernel_norm;       ///< ||R~||_{L^2}
  std::vector<double> source_norms;  ///< ||b_k||_{L^2}
  double literal_rhs;       ///< tr|R| + ||R~|| sum ||b_k||^2
  double empirical_constant;  ///< lhs / literal_rhs
  double residual;          ///< decomposition residual
  bool pass;
};

/// ||rho||^2_{H^s} <= ((n+2)/pi) (4/(n+2) tr|R|^2 + sqrt(pi) ||R~||^2 + sum 2 gamma_k ||b_k||^2), s = 1/(2(n+1)),
/// with b_k = F_x u_k. Throws InvalidDecomposition when the residual exceeds `tolerance`.
DensitySobolevReport density_sobolev_1d(const KernelField& k, const std::vector<Array2<cplx>>& u,
                                        double tolerance = 1e-6);

struct HalfBound {
  double lhs;      ///< ||rho||_{dot H^{1/2}}
  double product;  ///< ||R~||^{1/2} ||d_x d_y R~||^{1/2}
  double ratio;
};
HalfBound homogeneous_half_bound(const KernelField& k);

}  // namespace semiwig
