#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semiwig/evolution.hpp"
#include "semiwig/grid.hpp"
#include "semiwig/states.hpp"

namespace semiwig {

/// Density and velocity on a periodic box.
struct FluidState {
  Box box;
  std::vector<double> rho;
  std::vector<std::vector<double>> u;  ///< one field per axis
  double t = 0.0;
  double hbar = 1.0;
  double m = 1.0;

  double mass() const;
};

/// rho = |psi|^2, u = J / rho.
FluidState fluid_from_wave(const WaveFunction& psi, double m = 1.0, double t = 0.0);

/// sqrt(sum_n rho_c(x - q - n L)) e^{i p x / hbar}, with rho_c the coherent-state density. Periodic and
/// smooth on the grid when p L / (2 pi hbar) is an integer; throws InvalidParameter otherwise.
WaveFunction periodic_coherent_state(const SpatialGrid& grid, double q, double p, double hbar);

struct FluidRates {
  std::vector<double> drho;
  std::vector<std::vector<double>> du;
};

/// d_t rho = -div(rho u), d_t u = -(u.grad) u - grad(P + V)/m with the Bohm potential P.
/// In d > 1 V acts as the separable sum over axes. Throws VacuumError when min rho < floor.
FluidRates madelung_rhs(const FluidState& f, const Potential& v, double floor);

struct MadelungConfig {
  double dt = 1e-3;
  double t_final = 0.1;
  std::size_t record_stride = 1;
  bool filter = true;
  double filter_strength = 36.0;  ///< e^{-strength (k/kmax)^order} on u after every step
  int filter_order = 16;
  double floor_fraction = 1e-10;  ///< vacuum floor relative to max rho at t = 0
  double blowup_factor = 1e6;
};

enum class FluidStatus { completed, vacuum, blowup };
const char* to_string(FluidStatus s) noexcept;

struct MadelungResult {
  Trajectory<FluidState> trajectory;
  FluidStatus status = FluidStatus::completed;
  double halt_time = 0.0;  ///< time of the first violation, or t_final
  std::string message;
  double mass_drift = 0.0;  ///< max |mass(t) - mass(0)| / mass(0) over recorded frames
};

/// Classical RK4 with spectral derivatives. Throws StabilityError when dt violates the advective plus
/// dispersive restriction dt (max|u| kmax + hbar kmax^2 / 2m) <= 2.5 at t = 0.
MadelungResult madelung_evolve(const FluidState& f0, const Potential& v, const MadelungConfig& cfg);

/// Max relative gap between div(rho grad^2 log rho) and 2 rho grad(Lap sqrt rho / sqrt rho) in 1D.
double euler_forms_gap(const SpatialGrid& g, const std::vector<double>& rho);

struct ClosureFrame {
  double t;
  double continuity;     ///< L2 norm of d_t rho + d_x J
  double euler;          ///< L2 norm of d_t J + d_x(J^2/rho) + d_x(rho Pi)/m + rho V'/m
  double masked_fraction;
};

struct ClosureCheck {
  std::vector<ClosureFrame> frames;  ///< interior frames only (centered differences)
  double max_continuity = 0.0;
  double max_euler = 0.0;
};

/// Residuals of the Madelung continuity and Euler equations evaluated on moments of a 1D Schroedinger
/// trajectory; time derivatives by centered differences. Points with rho below mask_fraction * max rho
/// are excluded and counted.
ClosureCheck closure_crosscheck(const Trajectory<WaveFunction>& traj, const Potential& v, double m = 1.0,
                                double mask_fraction = 1e-6);

struct ComparisonRow {
  double t;
  double rho_error;  ///< ||rho_M - rho_S|| / ||rho_S||
  double u_error;    ///< ||rho_S (u_M - u_S)|| / ||rho_S u_S||, or absolute when u_S vanishes
  double continuity; ///< NaN at the first and last frame
  double euler;
};

/// Compares frame by frame; both trajectories must share times.
std::vector<ComparisonRow> compare_with_schrodinger(const Trajectory<FluidState>& fluid,
                                                    const Trajectory<WaveFunction>& waves, const Potential& v,
                                                    double m = 1.0);
/// t,L2_rho_err,L2_u_err,continuity_res,euler_res
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace semiwig
