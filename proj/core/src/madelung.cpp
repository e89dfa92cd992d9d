#include "semiwig/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "semiwig/error.hpp"
#include "semiwig/fft.hpp"
#include "semiwig/parallel.hpp"
#include "semiwig/semiclassics.hpp"

namespace semiwig {
namespace {

using Field = std::vector<double>;

Field d(const Box& box, const Field& f, std::size_t axis, int order = 1) {
  return fft::partial(box, std::span<const double>(f), axis, order);
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

double l2(const Field& f, double dv) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s * dv);
}

double kmax(const Box& box) {
  double k = 0.0;
  for (const auto& g : box.axes) k = std::max(k, std::numbers::pi / g.spacing());
  return k;
}

// Exponential low-pass along every axis.
void filter_field(const Box& box, Field& f, double strength, int order) {
  const auto shape = box.shape();
  std::vector<cplx> z(f.begin(), f.end());
  fft::execute_all(z.data(), shape, fft::Direction::forward);
  std::vector<std::vector<double>> w(box.dim());
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const auto& g = box.axes[a];
    const double km = std::numbers::pi / g.spacing();
    w[a].resize(g.n());
    for (std::size_t j = 0; j < g.n(); ++j)
      w[a][j] = std::exp(-strength * std::pow(std::abs(fft::fft_wavenumber(j, g)) / km, order));
  }
  const double inv = 1.0 / static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::size_t rem = i;
    double weight = inv;
    for (std::size_t a = box.dim(); a-- > 0;) {
      weight *= w[a][rem % shape[a]];
      rem /= shape[a];
    }
    z[i] *= weight;
  }
  fft::execute_all(z.data(), shape, fft::Direction::backward);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = z[i].real();
}

FluidState axpy(const FluidState& f, const FluidRates& r, double h) {
  FluidState g = f;
  for (std::size_t i = 0; i < g.rho.size(); ++i) g.rho[i] += h * r.drho[i];
  for (std::size_t a = 0; a < g.u.size(); ++a)
    for (std::size_t i = 0; i < g.rho.size(); ++i) g.u[a][i] += h * r.du[a][i];
  return g;
}

struct Moments1d {
  Field rho, J;
};

Moments1d moments_1d(const WaveFunction& psi, double m) {
  const auto& g = psi.grid();
  const auto& s = psi.samples();
  const auto ds = fft::derivative(g, std::span<const cplx>(s), 1);
  Moments1d out{Field(s.size()), Field(s.size())};
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.rho[i] = std::norm(s[i]);
    out.J[i] = psi.hbar() / m * (std::conj(s[i]) * ds[i]).imag();
  }
  return out;
}

}  // namespace

double FluidState::mass() const {
  double s = 0.0;
  for (double r : rho) s += r;
  return s * box.cell_volume();
}

FluidState fluid_from_wave(const WaveFunction& psi, double m, double t) {
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const Box& box = psi.box();
  FluidState f{box, psi.density(), {}, t, psi.hbar(), m};
  const auto& s = psi.samples();
  const double floor = 1e-300;
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const auto ds = fft::partial(box, std::span<const cplx>(s), a, 1);
    Field u(s.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (f.rho[i] > floor) u[i] = psi.hbar() / m * (std::conj(s[i]) * ds[i]).imag() / f.rho[i];
    f.u.push_back(std::move(u));
  }
  return f;
}

WaveFunction periodic_coherent_state(const SpatialGrid& grid, double q, double p, double hbar) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  const double L = grid.length();
  const double turns = p * L / (2 * std::numbers::pi * hbar);
  if (std::abs(turns - std::round(turns)) > 1e-9)
    throw InvalidParameter("p L / (2 pi hbar) must be an integer for a periodic phase");
  // images needed until e^{-(nL)^2/hbar} underflows relative to the peak
  const int images = 2 + static_cast<int>(std::ceil(std::sqrt(40.0 * hbar) / L));
  std::vector<cplx> s(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    double rho = 0.0;
    for (int n = -images; n <= images; ++n) {
      const double z = x - q - n * L;
      rho += std::exp(-z * z / hbar);
    }
    s[j] = std::sqrt(rho) * std::polar(1.0, p * x / hbar);
  }
  return normalize(Box(grid), hbar, std::move(s));
}

FluidRates madelung_rhs(const FluidState& f, const Potential& v, double floor) {
  const Box& box = f.box;
  const std::size_t n = f.rho.size();
  const double rmin = *std::min_element(f.rho.begin(), f.rho.end());
  if (!(rmin >= floor))
    throw VacuumError("density " + std::to_string(rmin) + " fell below the vacuum floor " + std::to_string(floor),
                      f.t);
  const auto P = bohm_potential(box, f.rho, f.hbar, f.m, 0.0);
  FluidRates r{Field(n, 0.0), std::vector<Field>(box.dim(), Field(n, 0.0))};
  for (std::size_t a = 0; a < box.dim(); ++a) {
    Field flux(n);
    for (std::size_t i = 0; i < n; ++i) flux[i] = f.rho[i] * f.u[a][i];
    const auto div = d(box, flux, a);
    for (std::size_t i = 0; i < n; ++i) r.drho[i] -= div[i];
  }
  for (std::size_t a = 0; a < box.dim(); ++a) {
    auto& du = r.du[a];
    for (std::size_t b = 0; b < box.dim(); ++b) {
      const auto g = d(box, f.u[a], b);
      for (std::size_t i = 0; i < n; ++i) du[i] -= f.u[b][i] * g[i];
    }
    const auto gp = d(box, P.values, a);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = box.point(i)[a];
      du[i] -= (gp[i] + v.gradient(x)) / f.m;
    }
  }
  return r;
}

const char* to_string(FluidStatus s) noexcept {
  switch (s) {
    case FluidStatus::completed: return "completed";
    case FluidStatus::vacuum: return "vacuum";
    case FluidStatus::blowup: return "blowup";
  }
  return "unknown";
}

MadelungResult madelung_evolve(const FluidState& f0, const Potential& v, const MadelungConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_final >= cfg.dt) || cfg.record_stride == 0)
    throw InvalidParameter("madelung config needs dt > 0, t_final >= dt and stride >= 1");
  const double ratio = cfg.t_final / cfg.dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
    throw InvalidParameter("t_final must be a whole number of steps");
  if (f0.u.size() != f0.box.dim() || f0.rho.size() != f0.box.size())
    throw InvalidParameter("fluid fields do not match the box");

  double umax = 0.0;
  for (const auto& u : f0.u) umax = std::max(umax, max_abs(u));
  const double k = kmax(f0.box);
  const double rate = umax * k + f0.hbar * k * k / (2 * f0.m);
  if (cfg.dt * rate > 2.5)
    throw StabilityError("time step exceeds the advective/dispersive limit", 0.9 * 2.5 / rate);

  const double floor = cfg.floor_fraction * max_abs(f0.rho);
  const double scale = std::max({max_abs(f0.rho), umax, 1.0});
  const double mass0 = f0.mass();

  MadelungResult res;
  res.trajectory.times.push_back(f0.t);
  res.trajectory.frames.push_back(f0);
  FluidState f = f0;
  const double h = cfg.dt;
  try {
    for (std::size_t s = 1; s <= steps; ++s) {
      const auto k1 = madelung_rhs(f, v, floor);
      auto s2 = axpy(f, k1, 0.5 * h);
      s2.t = f.t + 0.5 * h;
      const auto k2 = madelung_rhs(s2, v, floor);
      auto s3 = axpy(f, k2, 0.5 * h);
      s3.t = s2.t;
      const auto k3 = madelung_rhs(s3, v, floor);
      auto s4 = axpy(f, k3, h);
      s4.t = f.t + h;
      const auto k4 = madelung_rhs(s4, v, floor);
      for (std::size_t i = 0; i < f.rho.size(); ++i)
        f.rho[i] += h / 6.0 * (k1.drho[i] + 2 * k2.drho[i] + 2 * k3.drho[i] + k4.drho[i]);
      for (std::size_t a = 0; a < f.u.size(); ++a)
        for (std::size_t i = 0; i < f.rho.size(); ++i)
          f.u[a][i] += h / 6.0 * (k1.du[a][i] + 2 * k2.du[a][i] + 2 * k3.du[a][i] + k4.du[a][i]);
      f.t = f0.t + static_cast<double>(s) * h;
      if (cfg.filter)
        for (auto& u : f.u) filter_field(f.box, u, cfg.filter_strength, cfg.filter_order);

      double norm = max_abs(f.rho);
      for (const auto& u : f.u) norm = std::max(norm, max_abs(u));
      if (!std::isfinite(norm) || norm > cfg.blowup_factor * scale) {
        res.status = FluidStatus::blowup;
        res.halt_time = f.t;
        res.message = "field norm exceeded " + std::to_string(cfg.blowup_factor) + " times its initial size";
        break;
      }
      if (s % cfg.record_stride == 0 || s == steps) {
        res.trajectory.times.push_back(f.t);
        res.trajectory.frames.push_back(f);
        res.mass_drift = std::max(res.mass_drift, std::abs(f.mass() - mass0) / mass0);
      }
    }
  } catch (const VacuumError& e) {
    res.status = FluidStatus::vacuum;
    res.halt_time = e.time();
    res.message = e.what();
  }
  if (res.status == FluidStatus::completed) res.halt_time = f.t;
  return res;
}

double euler_forms_gap(const SpatialGrid& g, const std::vector<double>& rho) {
  const Box box(g);
  Field lg(rho.size()), sq(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) throw InvalidParameter("euler forms need a positive density");
    lg[i] = std::log(rho[i]);
    sq[i] = std::sqrt(rho[i]);
  }
  const auto l2d = d(box, lg, 0, 2);
  Field a(rho.size()), q(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) a[i] = rho[i] * l2d[i];
  const auto lhs = d(box, a, 0);
  const auto sq2 = d(box, sq, 0, 2);
  for (std::size_t i = 0; i < rho.size(); ++i) q[i] = sq2[i] / sq[i];
  const auto gq = d(box, q, 0);
  double diff = 0.0, top = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double rhs = 2 * rho[i] * gq[i];
    diff = std::max(diff, std::abs(lhs[i] - rhs));
    top = std::max({top, std::abs(lhs[i]), std::abs(rhs)});
  }
  return top > 0.0 ? diff / top : diff;
}

ClosureCheck closure_crosscheck(const Trajectory<WaveFunction>& traj, const Potential& v, double m,
                                double mask_fraction) {
  if (traj.size() < 3) throw InvalidParameter("closure check needs at least three frames");
  if (traj.frames.front().dim() != 1) throw InvalidParameter("closure check is one-dimensional");
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const auto& g = traj.frames.front().grid();
  const Box box(g);
  const double hbar = traj.frames.front().hbar();
  const double dt = traj.time_step();
  std::vector<Moments1d> mom(traj.size());
  parallel_for(traj.size(), [&](std::size_t i) { mom[i] = moments_1d(traj.frames[i], m); });

  ClosureCheck out;
  out.frames.resize(traj.size() - 2);
  parallel_for(traj.size() - 2, [&](std::size_t k) {
    const std::size_t n = k + 1;
    const auto& rho = mom[n].rho;
    const auto& J = mom[n].J;
    const auto r1 = d(box, rho, 0, 1), r2 = d(box, rho, 0, 2), r3 = d(box, rho, 0, 3);
    const auto j1 = d(box, J, 0, 1);
    const double cut = mask_fraction * max_abs(rho);
    Field cres(rho.size(), 0.0), eres(rho.size(), 0.0);
    std::size_t masked = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double drho = (mom[n + 1].rho[i] - mom[n - 1].rho[i]) / (2 * dt);
      const double dJ = (mom[n + 1].J[i] - mom[n - 1].J[i]) / (2 * dt);
      cres[i] = drho + j1[i];
      if (!(rho[i] > cut)) {
        ++masked;
        cres[i] = 0.0;
        continue;
      }
      const double r = rho[i];
      const double conv = 2 * J[i] * j1[i] / r - J[i] * J[i] * r1[i] / (r * r);
      // d_x(rho Pi) = -(hbar^2/4m)(rho''' - 2 rho' rho''/rho + rho'^3/rho^2)
      const double press =
          -hbar * hbar / (4 * m) * (r3[i] - 2 * r1[i] * r2[i] / r + r1[i] * r1[i] * r1[i] / (r * r));
      eres[i] = dJ + conv + press / m + r * v.gradient(g.node(i)) / m;
    }
    out.frames[k] = ClosureFrame{traj.times[n], l2(cres, g.spacing()), l2(eres, g.spacing()),
                                 static_cast<double>(masked) / static_cast<double>(rho.size())};
  });
  for (const auto& f : out.frames) {
    out.max_continuity = std::max(out.max_continuity, f.continuity);
    out.max_euler = std::max(out.max_euler, f.euler);
  }
  return out;
}

std::vector<ComparisonRow> compare_with_schrodinger(const Trajectory<FluidState>& fluid,
                                                    const Trajectory<WaveFunction>& waves, const Potential& v,
                                                    double m) {
  if (fluid.size() != waves.size()) throw InvalidParameter("trajectories have different lengths");
  for (std::size_t i = 0; i < fluid.size(); ++i)
    if (std::abs(fluid.times[i] - waves.times[i]) > 1e-9 * std::max(1.0, std::abs(waves.times[i])))
      throw InvalidParameter("trajectories are sampled at different times");
  std::optional<ClosureCheck> cc;
  if (waves.size() >= 3 && waves.frames.front().dim() == 1) cc = closure_crosscheck(waves, v, m);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < fluid.size(); ++i) {
    const auto& f = fluid.frames[i];
    const auto s = fluid_from_wave(waves.frames[i], m);
    double er = 0.0, nr = 0.0, eu = 0.0, nu = 0.0;
    for (std::size_t j = 0; j < f.rho.size(); ++j) {
      er += (f.rho[j] - s.rho[j]) * (f.rho[j] - s.rho[j]);
      nr += s.rho[j] * s.rho[j];
      for (std::size_t a = 0; a < f.u.size(); ++a) {
        const double w = s.rho[j] * (f.u[a][j] - s.u[a][j]);
        eu += w * w;
        nu += s.rho[j] * s.u[a][j] * s.rho[j] * s.u[a][j];
      }
    }
    ComparisonRow row{fluid.times[i], std::sqrt(er / nr), nu > 1e-30 ? std::sqrt(eu / nu) : std::sqrt(eu), nan, nan};
    if (cc && i >= 1 && i + 1 < fluid.size()) {
      row.continuity = cc->frames[i - 1].continuity;
      row.euler = cc->frames[i - 1].euler;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(12) << "t,L2_rho_err,L2_u_err,continuity_res,euler_res\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.rho_error << ',' << r.u_error << ',' << r.continuity << ',' << r.euler << '\n';
  return os.str();
}

}  // namespace semiwig
