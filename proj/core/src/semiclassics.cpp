#include "semiwig/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "semiwig/averaging.hpp"
#include "semiwig/error.hpp"
#include "semiwig/fft.hpp"
#include "semiwig/parallel.hpp"

namespace semiwig {
namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l1(const Box& box, const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s * box.cell_volume();
}

double integral(const Box& box, const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s * box.cell_volume();
}

// max |a - b| relative to the larger of max |a|, max |b|.
double relative_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  const double scale = std::max(max_abs(a), max_abs(b));
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<double> grad_squared(const Box& box, const std::vector<double>& f) {
  std::vector<double> g2(f.size(), 0.0);
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const auto g = fft::partial(box, std::span<const double>(f), a, 1);
    for (std::size_t i = 0; i < f.size(); ++i) g2[i] += g[i] * g[i];
  }
  return g2;
}

std::vector<double> squared(const std::vector<double>& f) {
  std::vector<double> s(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) s[i] = f[i] * f[i];
  return s;
}

// rho^2 P = -(hbar^2/4m)(rho Lap rho - |grad rho|^2 / 2), valid wherever rho > 0.
std::vector<double> rho2_bohm(const Box& box, const std::vector<double>& rho, double hbar, double m) {
  const auto lap = fft::laplacian(box, rho);
  const auto g2 = grad_squared(box, rho);
  std::vector<double> out(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = -hbar * hbar / (4 * m) * (rho[i] * lap[i] - 0.5 * g2[i]);
  return out;
}

// rho^2 Tr Pi = -(hbar^2/4m)(rho Lap rho - |grad rho|^2).
std::vector<double> rho2_trace_pressure(const Box& box, const std::vector<double>& rho, double hbar, double m) {
  const auto lap = fft::laplacian(box, rho);
  const auto g2 = grad_squared(box, rho);
  std::vector<double> out(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = -hbar * hbar / (4 * m) * (rho[i] * lap[i] - g2[i]);
  return out;
}

LineFit safe_fit(const std::vector<double>& h, const std::vector<double>& y) {
  for (double v : y)
    if (!(v > 0.0)) return LineFit{0.0, 0.0, 0.0, y.size()};
  return fit_loglog(h, y);
}

}  // namespace

MonokineticDefect monokinetic_defect(const MomentFields& mf, double hbar) {
  const Box& box = mf.box;
  const double m = mf.mass;
  MonokineticDefect d;
  d.field.resize(mf.rho.size());
  for (std::size_t i = 0; i < mf.rho.size(); ++i) {
    double j2 = 0.0;
    for (const auto& J : mf.current) j2 += J[i] * J[i];
    d.field[i] = 2 * m * mf.rho[i] * mf.energy[i] - m * m * j2;
  }
  d.l1 = l1(box, d.field);
  if (mf.rank_one && !*mf.rank_one) {
    d.applicable = false;
    d.note = "identity-inapplicable: the moments come from a mixed state; density-side comparison skipped";
    return d;
  }
  const auto lap_sq = fft::laplacian(box, squared(mf.rho));
  const auto g2 = grad_squared(box, mf.rho);
  d.rhs.resize(mf.rho.size());
  double diff = 0.0;
  for (std::size_t i = 0; i < d.rhs.size(); ++i) {
    d.rhs[i] = -hbar * hbar / 8.0 * lap_sq[i] + 0.5 * hbar * hbar * g2[i];
    diff += std::abs(d.field[i] - d.rhs[i]);
  }
  const double norm = l1(box, d.rhs) / box.cell_volume();
  d.relative_l1 = norm > 0.0 ? diff / norm : diff;
  return d;
}

std::vector<std::vector<double>> velocity_field(const MomentFields& mf) {
  const double floor = 1e-12 * max_abs(mf.rho);
  std::vector<std::vector<double>> u(mf.current.size(), std::vector<double>(mf.rho.size(), 0.0));
  for (std::size_t a = 0; a < mf.current.size(); ++a)
    for (std::size_t i = 0; i < mf.rho.size(); ++i)
      if (mf.rho[i] > floor) u[a][i] = mf.current[a][i] / mf.rho[i];
  return u;
}

MaskedField bohm_potential(const Box& box, const std::vector<double>& rho, double hbar, double m, double floor) {
  if (!(hbar > 0.0) || !(m > 0.0)) throw InvalidParameter("hbar and mass must be positive");
  const double cut = floor * max_abs(rho);
  const auto lap = fft::laplacian(box, rho);
  const auto g2 = grad_squared(box, rho);
  MaskedField p{std::vector<double>(rho.size(), 0.0), std::vector<std::uint8_t>(rho.size(), 0)};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > cut)) continue;
    p.values[i] = -hbar * hbar / (4 * m) * (lap[i] / rho[i] - 0.5 * g2[i] / (rho[i] * rho[i]));
    p.valid[i] = 1;
  }
  return p;
}

std::vector<MaskedField> pressure_tensor(const Box& box, const std::vector<double>& rho, double hbar, double m,
                                         double floor) {
  if (!(hbar > 0.0) || !(m > 0.0)) throw InvalidParameter("hbar and mass must be positive");
  const std::size_t d = box.dim();
  const double cut = floor * max_abs(rho);
  std::vector<std::vector<double>> g(d);
  for (std::size_t a = 0; a < d; ++a) g[a] = fft::partial(box, std::span<const double>(rho), a, 1);
  std::vector<MaskedField> pi;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const auto h = j == k ? fft::partial(box, std::span<const double>(rho), j, 2)
                            : fft::partial(box, std::span<const double>(g[k]), j, 1);
      MaskedField f{std::vector<double>(rho.size(), 0.0), std::vector<std::uint8_t>(rho.size(), 0)};
      for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > cut)) continue;
        f.values[i] = -hbar * hbar / (4 * m) * (h[i] / rho[i] - g[j][i] * g[k][i] / (rho[i] * rho[i]));
        f.valid[i] = 1;
      }
      pi.push_back(std::move(f));
    }
  }
  return pi;
}

double PressureIdentityReport::max_residual() const {
  return std::max({bohm_form, pressure_form, link, integrated_bohm_form, integrated_pressure_form});
}

PressureIdentityReport pressure_identity_check(const Box& box, const std::vector<double>& rho, double hbar, double m) {
  for (double r : rho)
    if (!(r > 0.0)) throw InvalidParameter("pressure identities need a positive density");
  const double h2 = hbar * hbar;
  const auto g2 = grad_squared(box, rho);
  const auto lap_sq = fft::laplacian(box, squared(rho));
  const auto r2p = rho2_bohm(box, rho, hbar, m);
  // Tr Pi from the tensor itself, so the check exercises pressure_tensor.
  const auto pi = pressure_tensor(box, rho, hbar, m, 0.0);
  std::vector<double> r2tr(rho.size(), 0.0);
  for (std::size_t a = 0; a < box.dim(); ++a)
    for (std::size_t i = 0; i < rho.size(); ++i) r2tr[i] += rho[i] * rho[i] * pi[a * box.dim() + a].values[i];

  std::vector<double> lhs(rho.size()), bohm(rho.size()), press(rho.size()), link_l(rho.size()), link_r(rho.size()),
      bohm_lit(rho.size()), press_lit(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    lhs[i] = h2 * g2[i];
    bohm[i] = h2 * lap_sq[i] / 3.0 + 8.0 / 3.0 * m * r2p[i];
    press[i] = h2 * lap_sq[i] / 4.0 + 2.0 * m * r2tr[i];
    link_l[i] = r2tr[i];
    link_r[i] = r2p[i] + h2 / (8 * m) * g2[i];
    bohm_lit[i] = 4.0 / 3.0 * h2 * lap_sq[i] + 8.0 / 3.0 * m * r2p[i];
    press_lit[i] = h2 * lap_sq[i] + 2.0 * m * r2tr[i];
  }
  PressureIdentityReport rep;
  rep.bohm_form = relative_gap(lhs, bohm);
  rep.pressure_form = relative_gap(lhs, press);
  rep.link = relative_gap(link_l, link_r);
  rep.pointwise_bohm_variant = relative_gap(lhs, bohm_lit);
  rep.pointwise_pressure_variant = relative_gap(lhs, press_lit);
  const double il = integral(box, lhs);
  rep.grad_sq_integral = il;
  const double scale = std::max(std::abs(il), l1(box, lhs));
  auto rel = [&](double v) { return scale > 0.0 ? std::abs(il - v) / scale : std::abs(il - v); };
  rep.integrated_bohm_form = rel(integral(box, bohm_lit));
  rep.integrated_pressure_form = rel(integral(box, press_lit));
  return rep;
}

std::vector<double> bump_window(const Box& box, double R) {
  if (!(R > 0.0)) throw InvalidParameter("window radius must be positive");
  std::vector<double> w(box.size());
  const double inner = 0.9 * R;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const auto x = box.point(i);
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double r = std::sqrt(r2);
    if (r <= inner)
      w[i] = 1.0;
    else if (r >= R)
      w[i] = 0.0;
    else
      w[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * (r - inner) / (R - inner)));
  }
  return w;
}

SweepReport concentration_sweep(const std::function<WaveFunction(double)>& family, const std::vector<double>& hbars,
                                const std::vector<double>& times, const SweepOptions& opts) {
  require_geometric(hbars);
  if (times.empty()) throw InvalidSweep("at least one time is required");
  for (double t : times)
    if (t < 0.0) throw InvalidSweep("sweep times must be nonnegative");
  SweepReport rep{hbars, times, std::vector<SweepRow>(hbars.size() * times.size()), {}};
  const double m = opts.mass;

  parallel_for(hbars.size(), [&](std::size_t h) {
    const double hbar = hbars[h];
    WaveFunction psi = family(hbar);
    const Box& box = psi.box();
    double R = opts.radius;
    if (R <= 0.0) {
      R = std::numeric_limits<double>::infinity();
      for (const auto& g : box.axes) R = std::min(R, 0.5 * g.length());
    }
    const auto window = bump_window(box, R);
    double t_now = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double t = times[ti];
      if (t > t_now) {
        const double span = t - t_now;
        const auto steps = static_cast<std::size_t>(std::ceil(span / opts.dt - 1e-9));
        SplitStepPropagator prop(box, opts.potential, hbar, span / static_cast<double>(steps), m);
        check_step_resolution(psi, opts.potential, span / static_cast<double>(steps), m);
        auto samples = psi.samples();
        for (std::size_t s = 0; s < steps; ++s) prop.step(samples);
        psi = WaveFunction(box, hbar, std::move(samples));
        t_now = t;
      }
      const QuantumState st(psi);
      const auto mf = moments_from_state(st, m);
      const auto defect = monokinetic_defect(mf, hbar);
      const auto g2 = grad_squared(box, mf.rho);
      const auto r2p = rho2_bohm(box, mf.rho, hbar, m);
      const auto r2t = rho2_trace_pressure(box, mf.rho, hbar, m);
      SweepRow row{hbar, t, 0, 0, defect.relative_l1, 0, 0, 0};
      double mass = 0.0, defect_int = 0.0;
      for (std::size_t i = 0; i < box.size(); ++i) {
        row.grad_rho_sq += hbar * hbar * g2[i] * window[i];
        row.defect_l1 += std::abs(defect.field[i]) * window[i];
        row.rho2P_l1 += std::abs(r2p[i]) * window[i];
        row.rho2TrPi_l1 += std::abs(r2t[i]) * window[i];
        defect_int += defect.field[i];
        mass += mf.rho[i];
      }
      const double dv = box.cell_volume();
      row.grad_rho_sq *= dv;
      row.defect_l1 *= dv;
      row.rho2P_l1 *= dv;
      row.rho2TrPi_l1 *= dv;
      row.xi_spread = defect_int / mass;
      rep.rows[h * times.size() + ti] = row;
    }
  });

  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    std::vector<double> g, d, p, tp;
    for (std::size_t h = 0; h < hbars.size(); ++h) {
      const auto& r = rep.rows[h * times.size() + ti];
      g.push_back(r.grad_rho_sq);
      d.push_back(r.defect_l1);
      p.push_back(r.rho2P_l1);
      tp.push_back(r.rho2TrPi_l1);
    }
    SweepFits f{times[ti], safe_fit(hbars, g), safe_fit(hbars, d), safe_fit(hbars, p), safe_fit(hbars, tp),
                false, false, false, false, false, false};
    const double tol = opts.decay_tolerance;
    f.grad_decays = f.grad_rho_sq.slope > tol;
    f.defect_decays = f.defect.slope > tol;
    f.rho2P_decays = f.rho2P.slope > tol;
    f.rho2TrPi_decays = f.rho2TrPi.slope > tol;
    f.equivalence_holds = f.grad_decays == f.rho2P_decays && f.grad_decays == f.rho2TrPi_decays;
    f.monokinetic = f.grad_decays && f.defect_decays;
    rep.fits.push_back(f);
  }
  return rep;
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "hbar,t,grad_rho_sq,defect_l1,rho2P_l1,rho2TrPi_l1,xi_spread\n";
  for (const auto& row : r.rows)
    os << row.hbar << ',' << row.t << ',' << row.grad_rho_sq << ',' << row.defect_l1 << ',' << row.rho2P_l1 << ','
       << row.rho2TrPi_l1 << ',' << row.xi_spread << '\n';
  for (const auto& f : r.fits)
    os << "exponent," << f.t << ',' << f.grad_rho_sq.slope << ',' << f.defect.slope << ',' << f.rho2P.slope << ','
       << f.rho2TrPi.slope << ",\n";
  return os.str();
}

}  // namespace semiwig
