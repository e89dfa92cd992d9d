#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semiwig/array.hpp"
#include "semiwig/states.hpp"
#include "semiwig/wigner.hpp"

namespace semiwig {

enum class Backend { schrodinger, von_neumann, wigner };

const char* to_string(Backend b) noexcept;
Backend backend_from_string(const std::string& name);

struct EvolutionConfig {
  double dt = 1e-2;
  double t_final = 1.0;
  Backend backend = Backend::von_neumann;
  double mass = 1.0;
  std::size_t record_stride = 1;

  /// Checks dt > 0, t_final >= dt, t_final a whole number of steps, stride >= 1.
  void validate() const;
  std::size_t steps() const;
};

/// Uniformly spaced snapshots, t = 0 first.
template <class T>
struct Trajectory {
  std::vector<double> times;
  std::vector<T> frames;

  std::size_t size() const noexcept { return frames.size(); }
  double time_step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Called with (frame index, time, frame) as each snapshot is recorded.
template <class T>
using FrameSink = std::function<void(std::size_t, double, const T&)>;

// ---- Schroedinger backend ---------------------------------------------------------------------

/// Largest |dt| with at most 2pi/8 phase per step on the state's effective band and support.
double stable_time_step(const WaveFunction& psi, const Potential& v, double m);
/// Throws StabilityError carrying stable_time_step when |dt| exceeds it.
void check_step_resolution(const WaveFunction& psi, const Potential& v, double dt, double m);

/// Strang split-step: half kinetic, full potential, half kinetic. dt may be negative.
/// In d > 1 the potential acts as the separable sum of V over the axes.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Box& box, const Potential& v, double hbar, double dt, double m);
  void step(std::vector<cplx>& samples) const;

 private:
  Box box_;
  std::vector<cplx> kinetic_half_;  ///< FFT-ordered multiplier, includes 1/N
  std::vector<cplx> potential_;
};

WaveFunction schrodinger_step(const WaveFunction& psi, const Potential& v, double dt, double m);
Trajectory<WaveFunction> schrodinger_evolve(const WaveFunction& psi, const Potential& v,
                                            const EvolutionConfig& cfg,
                                            const FrameSink<WaveFunction>& sink = {});

/// R(t) = U R0 U*: every eigenfunction is propagated, weights are kept.
Trajectory<QuantumState> von_neumann_evolve(const QuantumState& s, const Potential& v, const EvolutionConfig& cfg,
                                            const FrameSink<QuantumState>& sink = {});

// ---- Wigner backend -------------------------------------------------------------------------

/// (V(x + hbar y/2) - V(x - hbar y/2)) / (i hbar).
cplx delta_V(const Potential& v, double x, double y, double hbar);
/// delta[V] sampled on the (x, y) grid.
Array2<cplx> delta_field(const Potential& v, const PhaseGrid& g, double hbar);
/// K[V](x, xi) = (2pi)^{-1} F_{y->xi} delta[V] on the discrete torus.
Array2<cplx> k_kernel(const Potential& v, const PhaseGrid& g, double hbar);

/// theta[V]W = (2pi)^{-1} F_{y->xi}(delta[V] R~), the discrete form of K[V] *_xi W.
WignerField theta_apply(const WignerField& w, const Potential& v);

/// Largest |dt| whose transport shift and potential phases stay below 2pi/8 on the support of W.
double stable_time_step(const WignerField& w, const Potential& v, double m);

/// One Strang step: half transport, exact y-space potential phase, half transport. dt may be negative.
WignerField wigner_step(const WignerField& w, const Potential& v, double dt, double m);
Trajectory<WignerField> wigner_evolve(const WignerField& w0, const Potential& v, const EvolutionConfig& cfg,
                                      const FrameSink<WignerField>& sink = {});

/// Evolves with cfg.backend and returns Wigner frames on `grid`.
Trajectory<WignerField> evolve_wigner_frames(const QuantumState& s, const Potential& v, const EvolutionConfig& cfg,
                                             std::optional<PhaseGrid> grid = std::nullopt);

struct LKernelReport {
  double symbol_max = 0.0;          ///< max |delta[V]| / |y| over y != 0
  double symbol_min = 0.0;          ///< min of the same
  double lipschitz = 0.0;           ///< declared constant
  double divergence_residual = 0.0; ///< max |d_xi L[V] - K[V]| / max |K[V]|
};
/// Symbol bound |delta[V](x,y)|/|y| <= Lip(V) and the identity d_xi L[V] = K[V] on the grid.
/// Throws MetadataError when Lip(V) is missing or exceeded.
LKernelReport l_kernel_check(const Potential& v, const PhaseGrid& g, double hbar);

}  // namespace semiwig
