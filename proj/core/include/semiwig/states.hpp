#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semiwig/array.hpp"
#include "semiwig/expression.hpp"
#include "semiwig/grid.hpp"

namespace semiwig {

enum class BoundaryPolicy { warn, error, ignore };

struct StateOptions {
  double decay_threshold = 1e-12;
  BoundaryPolicy policy = BoundaryPolicy::warn;
};

/// Destination for non-fatal diagnostics (boundary decay, flagged inputs). Defaults to stderr.
void set_warning_sink(std::function<void(const std::string&)> sink);
void emit_warning(const std::string& message);

/// Normalized samples of a wave function on a box, with its hbar.
class WaveFunction {
 public:
  /// Checks hbar > 0, sample count, and unit discrete norm within 1e-10.
  WaveFunction(Box box, double hbar, std::vector<cplx> samples);

  const Box& box() const noexcept { return box_; }
  /// The single axis of a one-dimensional wave function.
  const SpatialGrid& grid() const;
  double hbar() const noexcept { return hbar_; }
  const std::vector<cplx>& samples() const noexcept { return samples_; }
  std::size_t dim() const noexcept { return box_.dim(); }

  /// |psi|^2 on the grid.
  std::vector<double> density() const;

 private:
  Box box_;
  double hbar_;
  std::vector<cplx> samples_;
};

/// Discrete L2 inner product <a, b> = sum conj(a) b dV.
cplx inner_product(const Box& box, const std::vector<cplx>& a, const std::vector<cplx>& b);
double l2_norm(const Box& box, const std::vector<cplx>& a);

/// Rescales samples to unit discrete norm; throws InvalidState on a zero vector.
WaveFunction normalize(Box box, double hbar, std::vector<cplx> samples);

/// Largest |psi| over the outermost nodes of every axis.
double boundary_amplitude(const WaveFunction& psi);
/// Applies the boundary-decay policy.
void check_boundary_decay(const WaveFunction& psi, const StateOptions& opts, const std::string& what);

/// Finite-rank density operator sum_j lambda_j |psi_j><psi_j|.
class QuantumState {
 public:
  /// Validates weights (>= 0, sum 1 within 1e-10) and orthonormality (|<psi_i,psi_j>| <= 1e-8).
  QuantumState(std::vector<double> weights, std::vector<WaveFunction> waves);
  explicit QuantumState(WaveFunction pure);

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<WaveFunction>& waves() const noexcept { return waves_; }
  double hbar() const noexcept { return waves_.front().hbar(); }
  const Box& box() const noexcept { return waves_.front().box(); }
  const SpatialGrid& grid() const { return waves_.front().grid(); }
  std::size_t rank() const noexcept { return waves_.size(); }
  std::size_t dim() const noexcept { return box().dim(); }

  /// sum lambda_j |psi_j|^2.
  std::vector<double> density() const;

 private:
  std::vector<double> weights_;
  std::vector<WaveFunction> waves_;
};

/// Real potential, evaluable anywhere (including off-grid points x +- hbar y / 2).
struct Potential {
  std::function<double(double)> value;
  std::function<double(double)> derivative;  ///< optional; finite differences otherwise
  std::optional<double> supnorm;
  std::optional<double> lipschitz;
  std::string description;

  double operator()(double x) const { return value(x); }
  double gradient(double x) const;

  static Potential zero();
  static Potential constant(double c);
  static Potential linear(double slope);
  /// m omega^2 (x - center)^2 / 2.
  static Potential harmonic(double m, double omega, double center = 0.0);
  /// sqrt(1 + x^2) - 1 scaled: globally Lipschitz with constant `strength`, harmonic near 0.
  static Potential soft_harmonic(double strength = 1.0);
  /// Parses an expression in x (and optionally hbar) with exact derivative by dual numbers.
  static Potential from_expression(const std::string& text, double hbar = 1.0);
};

/// Checks declared supnorm / Lipschitz bounds against sampled estimates on [a, b]; throws MetadataError.
void check_declared_bounds(const Potential& v, double a, double b, std::size_t samples = 4096);

// ---- constructors --------------------------------------------------------------------------

/// (pi hbar)^{-d/4} e^{-|x-q|^2/2hbar} e^{i p.(x-q/2)/hbar} sampled on the box.
WaveFunction coherent_state(const Box& box, const std::vector<double>& q, const std::vector<double>& p,
                            double hbar, const StateOptions& opts = {});
WaveFunction coherent_state(const SpatialGrid& grid, double q, double p, double hbar,
                            const StateOptions& opts = {});

/// a(x) e^{i S(x)/hbar}, renormalized.
WaveFunction wkb_state(const SpatialGrid& grid, const std::function<double(double)>& a,
                       const std::function<double(double)>& S, double hbar,
                       const StateOptions& opts = {});

/// hbar^{-alpha/2} a(x/hbar^alpha) e^{i p x/hbar}, renormalized. `width` is the profile scale
/// used for the resolution check (at least 8 nodes across width*hbar^alpha).
WaveFunction scaled_state(const SpatialGrid& grid, const std::function<double(double)>& a, double p,
                          double alpha, double hbar, double width = 1.0, const StateOptions& opts = {});

/// n-th eigenfunction of -hbar^2/2m d^2 + m omega^2 (x-c)^2/2 (Hermite function).
WaveFunction harmonic_eigenstate(const SpatialGrid& grid, std::size_t n, double hbar, double m = 1.0,
                                 double omega = 1.0, double center = 0.0, const StateOptions& opts = {});

struct Eigenpairs {
  std::vector<double> energies;
  std::vector<WaveFunction> states;
};
/// Lowest `count` eigenpairs of the Fourier-grid Hamiltonian -hbar^2/2m d^2 + V on the periodic grid.
Eigenpairs stationary_states(const SpatialGrid& grid, const Potential& v, double hbar, double m,
                             std::size_t count);

/// Orthonormalizes `waves` (modified Gram-Schmidt with one re-orthogonalization pass, tolerance
/// 1e-10) and attaches `weights`.
QuantumState mixed_state(const std::vector<WaveFunction>& waves, const std::vector<double>& weights);
std::vector<WaveFunction> gram_schmidt(const std::vector<WaveFunction>& waves, double tol = 1e-10);

/// tr(R^2) = sum lambda_j^2.
double hilbert_schmidt_trace(const QuantumState& s);

/// ceil(1 / ((2 pi hbar)^d C)).
std::size_t rank_lower_bound(double C, double hbar, std::size_t d = 1);

/// Equal-weight mixture of the first ceil(1/((2 pi hbar)^d C)) harmonic eigenstates.
QuantumState admissible_mixture(const SpatialGrid& grid, double hbar, double m = 1.0, double omega = 1.0,
                                double C = 1.0);

}  // namespace semiwig
