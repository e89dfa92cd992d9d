#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semiwig/evolution.hpp"
#include "semiwig/fit.hpp"
#include "semiwig/grid.hpp"
#include "semiwig/states.hpp"
#include "semiwig/wigner.hpp"

namespace semiwig {

/// 2m rho E - m^2 |J|^2 from the moments, against -(hbar^2/8) Lap(rho^2) + (hbar^2/2)|grad rho|^2 from rho.
struct MonokineticDefect {
  std::vector<double> field;  ///< moment side
  std::vector<double> rhs;    ///< density side (empty when not applicable)
  double l1 = 0.0;            ///< integral of |field|
  double relative_l1 = 0.0;   ///< ||field - rhs||_1 / ||rhs||_1
  bool applicable = true;     ///< false for states known to be mixed
  std::string note;
};
MonokineticDefect monokinetic_defect(const MomentFields& m, double hbar);

/// u = J / rho where rho > 1e-12 max rho, 0 elsewhere; one field per axis.
std::vector<std::vector<double>> velocity_field(const MomentFields& m);

/// Fields with a validity mask (rho above the floor).
struct MaskedField {
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

/// P = -(hbar^2/2m) Lap(sqrt rho)/sqrt rho, evaluated as -(hbar^2/4m)(Lap rho/rho - |grad rho|^2/(2 rho^2)).
MaskedField bohm_potential(const Box& box, const std::vector<double>& rho, double hbar, double m,
                           double floor = 1e-12);
/// Pi_jk = -(hbar^2/4m) d_j d_k log rho, row-major d x d list of fields.
std::vector<MaskedField> pressure_tensor(const Box& box, const std::vector<double>& rho, double hbar, double m,
                                         double floor = 1e-12);

/// Pointwise identities linking hbar^2 |grad rho|^2, rho^2 P and rho^2 Tr Pi. The pointwise forms are
///   hbar^2 |grad rho|^2 = (1/3) hbar^2 Lap(rho^2) + (8/3) m rho^2 P = (1/4) hbar^2 Lap(rho^2) + 2 m rho^2 Tr Pi,
///   rho^2 Tr Pi = rho^2 P + (hbar^2/8m) |grad rho|^2.
/// The variants with coefficients 4/3 and 1 in front of hbar^2 Lap(rho^2) hold after integration only
/// and are reported both integrated and pointwise.
struct PressureIdentityReport {
  double bohm_form = 0.0;          ///< max relative pointwise residual, P form
  double pressure_form = 0.0;      ///< same, Tr Pi form
  double link = 0.0;               ///< Tr Pi versus P
  double integrated_bohm_form = 0.0;      ///< 4/3 variant, integrated
  double integrated_pressure_form = 0.0;  ///< 1 variant, integrated
  double pointwise_bohm_variant = 0.0;    ///< 4/3 variant, pointwise (nonzero in general)
  double pointwise_pressure_variant = 0.0;
  double grad_sq_integral = 0.0;   ///< hbar^2 ||grad rho||^2
  double max_residual() const;     ///< over the identities that hold pointwise or integrated
};
PressureIdentityReport pressure_identity_check(const Box& box, const std::vector<double>& rho, double hbar, double m);

/// Smooth indicator of |x| <= R: 1 inside 0.9 R, cosine roll-off to 0 at R.
std::vector<double> bump_window(const Box& box, double R);

struct SweepRow {
  double hbar;
  double t;
  double grad_rho_sq;   ///< hbar^2 ||grad rho||^2 on the window
  double defect_l1;
  double identity_gap;  ///< relative L1 mismatch of the two sides of the defect identity
  double xi_spread;     ///< defect integral over mass
  double rho2P_l1;
  double rho2TrPi_l1;
};

struct SweepFits {
  double t;
  LineFit grad_rho_sq, defect, rho2P, rho2TrPi;
  bool grad_decays, defect_decays, rho2P_decays, rho2TrPi_decays;
  bool equivalence_holds;  ///< the three grad/P/TrPi verdicts coincide
  bool monokinetic;        ///< grad and defect both decay
};

struct SweepReport {
  std::vector<double> hbars;
  std::vector<double> times;
  std::vector<SweepRow> rows;   ///< hbar-major, then time
  std::vector<SweepFits> fits;  ///< one per time
};

struct SweepOptions {
  double mass = 1.0;
  double radius = 0.0;        ///< window radius, 0 = half the smallest box length
  double decay_tolerance = 0.05;  ///< exponent above which a metric counts as decaying
  double dt = 1e-3;           ///< step used when times other than 0 are requested
  Potential potential = Potential::zero();
};

/// Builds a pure state per hbar (optionally evolves it to every t) and tabulates the metrics.
SweepReport concentration_sweep(const std::function<WaveFunction(double)>& family, const std::vector<double>& hbars,
                                const std::vector<double>& times = {0.0}, const SweepOptions& opts = {});

/// CSV rows: hbar,t,grad_rho_sq,defect_l1,rho2P_l1,rho2TrPi_l1,xi_spread and one summary row per time.
std::string sweep_csv(const SweepReport& r);

}  // namespace semiwig
