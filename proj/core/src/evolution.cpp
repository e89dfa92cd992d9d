#include "semiwig/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "semiwig/error.hpp"
#include "semiwig/fft.hpp"
#include "semiwig/parallel.hpp"

namespace semiwig {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxPhase = kTwoPi / 8.0;
constexpr double kBandThreshold = 1e-10;
constexpr double kSupportThreshold = 1e-12;

double relative_threshold_max(const std::vector<double>& mags, double rel) {
  const double top = *std::max_element(mags.begin(), mags.end());
  return top * rel;
}

// Sum of V over the axes at a flat box index.
double separable_potential(const Box& box, const Potential& v, std::size_t flat) {
  double s = 0.0;
  for (double xi : box.point(flat)) s += v(xi);
  return s;
}

// |k|^2 of an FFT-ordered flat index.
double wavenumber_squared(const Box& box, std::size_t flat) {
  const auto shape = box.shape();
  double k2 = 0.0;
  for (std::size_t a = box.dim(); a-- > 0;) {
    const std::size_t j = flat % shape[a];
    flat /= shape[a];
    const double k = fft::fft_wavenumber(j, box.axes[a]);
    k2 += k * k;
  }
  return k2;
}

std::string format_dt(double dt) {
  std::ostringstream os;
  os.precision(6);
  os << dt;
  return os.str();
}

void require_stable(double dt, double limit, const char* what) {
  if (std::abs(dt) > limit) {
    const double suggested = 0.9 * limit;
    throw StabilityError(std::string(what) + ": dt = " + format_dt(std::abs(dt)) +
                             " under-resolves the step phases; use dt <= " + format_dt(suggested),
                         suggested);
  }
}

// Multiplier for a real shift by s of FFT-ordered mode j; the Nyquist mode keeps its cosine.
cplx shift_factor(std::size_t j, std::size_t n, double k, double s) {
  if (j == n / 2) return {std::cos(k * s), 0.0};
  return std::polar(1.0, -k * s);
}

template <class T>
void record(Trajectory<T>& traj, const FrameSink<T>& sink, double t, T frame) {
  if (sink) sink(traj.frames.size(), t, frame);
  traj.times.push_back(t);
  traj.frames.push_back(std::move(frame));
}

// State of the Wigner backend between steps: W(x, xi) as complex samples.
class WignerStepper {
 public:
  WignerStepper(const PhaseGrid& g, const Potential& v, double hbar, double dt, double m)
      : g_(g),
        transport_(g.xgrid.n(), g.ygrid.n()),
        potential_(g.xgrid.n(), g.ygrid.n()) {
    const std::size_t nx = g.xgrid.n(), ny = g.ygrid.n();
    const double half = 0.5 * dt / m;
    const double inv_n = 1.0 / static_cast<double>(nx);
    for (std::size_t r = 0; r < nx; ++r) {
      const double k = fft::fft_wavenumber(r, g.xgrid);
      for (std::size_t c = 0; c < ny; ++c)
        transport_(r, c) = inv_n * shift_factor(r, nx, k, g.xigrid.frequency(c) * half);
    }
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = g.xgrid.node(i);
      for (std::size_t c = 0; c < ny; ++c) {
        const double y = g.ygrid.node(c);
        const double dv = v(x + 0.5 * hbar * y) - v(x - 0.5 * hbar * y);
        potential_(i, c) = std::polar(1.0, -dt * dv / hbar);
      }
    }
  }

  void step(Array2<cplx>& w) const {
    transport(w);
    fft::inverse_axis(w, g_.ygrid, 1);
    for (std::size_t i = 0; i < w.size(); ++i) w.data[i] *= potential_.data[i];
    fft::forward_axis(w, g_.ygrid, 1);
    transport(w);
  }

 private:
  void transport(Array2<cplx>& w) const {
    const std::vector<std::size_t> shape{w.rows, w.cols};
    fft::execute_axis(w.data.data(), shape, 0, fft::Direction::forward);
    for (std::size_t i = 0; i < w.size(); ++i) w.data[i] *= transport_.data[i];
    fft::execute_axis(w.data.data(), shape, 0, fft::Direction::backward);
  }

  PhaseGrid g_;
  Array2<cplx> transport_;
  Array2<cplx> potential_;
};

Array2<cplx> complexify(const WignerField& w) {
  Array2<cplx> a(w.values.rows, w.values.cols);
  for (std::size_t i = 0; i < a.size(); ++i) a.data[i] = w.values.data[i];
  return a;
}

WignerField realify(const PhaseGrid& g, double hbar, const Array2<cplx>& a) {
  WignerField w{g, hbar, Array2<double>(a.rows, a.cols)};
  double imag = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    w.values.data[i] = a.data[i].real();
    imag = std::max(imag, std::abs(a.data[i].imag()));
  }
  w.max_imag = imag;
  return w;
}

}  // namespace

const char* to_string(Backend b) noexcept {
  switch (b) {
    case Backend::schrodinger: return "schrodinger";
    case Backend::von_neumann: return "von_neumann";
    case Backend::wigner: return "wigner";
  }
  return "unknown";
}

Backend backend_from_string(const std::string& name) {
  if (name == "schrodinger") return Backend::schrodinger;
  if (name == "von_neumann") return Backend::von_neumann;
  if (name == "wigner") return Backend::wigner;
  throw InvalidParameter("unknown backend '" + name + "' (expected schrodinger, von_neumann or wigner)");
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
  if (!(t_final >= dt)) throw InvalidParameter("t_final must be at least dt");
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (record_stride == 0) throw InvalidParameter("record_stride must be at least 1");
  const double n = t_final / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw InvalidParameter("t_final must be a whole number of time steps");
}

std::size_t EvolutionConfig::steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }

// ---- Schroedinger backend ---------------------------------------------------------------------

double stable_time_step(const WaveFunction& psi, const Potential& v, double m) {
  const Box& box = psi.box();
  const double hbar = psi.hbar();
  std::vector<cplx> spec = psi.samples();
  fft::execute_all(spec.data(), box.shape(), fft::Direction::forward);
  std::vector<double> mag(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) mag[i] = std::abs(spec[i]);
  const double band = relative_threshold_max(mag, kBandThreshold);
  double k2max = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (mag[i] > band) k2max = std::max(k2max, wavenumber_squared(box, i));

  const auto rho = psi.density();
  const double floor = relative_threshold_max(rho, kSupportThreshold);
  double vmax = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] > floor) vmax = std::max(vmax, std::abs(separable_potential(box, v, i)));

  double limit = std::numeric_limits<double>::infinity();
  if (k2max > 0.0) limit = std::min(limit, kMaxPhase * 2.0 * m / (hbar * k2max));
  if (vmax > 0.0) limit = std::min(limit, kMaxPhase * hbar / vmax);
  return limit;
}

void check_step_resolution(const WaveFunction& psi, const Potential& v, double dt, double m) {
  require_stable(dt, stable_time_step(psi, v, m), "schrodinger step");
}

SplitStepPropagator::SplitStepPropagator(const Box& box, const Potential& v, double hbar, double dt, double m)
    : box_(box), kinetic_half_(box.size()), potential_(box.size()) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const double inv_n = 1.0 / static_cast<double>(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    kinetic_half_[i] = inv_n * std::polar(1.0, -dt * hbar * wavenumber_squared(box, i) / (4.0 * m));
    potential_[i] = std::polar(1.0, -dt * separable_potential(box, v, i) / hbar);
  }
}

void SplitStepPropagator::step(std::vector<cplx>& psi) const {
  const auto shape = box_.shape();
  // The 1/N of each inverse transform is folded into the kinetic multiplier.
  fft::execute_all(psi.data(), shape, fft::Direction::forward);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kinetic_half_[i];
  fft::execute_all(psi.data(), shape, fft::Direction::backward);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= potential_[i];
  fft::execute_all(psi.data(), shape, fft::Direction::forward);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kinetic_half_[i];
  fft::execute_all(psi.data(), shape, fft::Direction::backward);
}

WaveFunction schrodinger_step(const WaveFunction& psi, const Potential& v, double dt, double m) {
  check_step_resolution(psi, v, dt, m);
  SplitStepPropagator prop(psi.box(), v, psi.hbar(), dt, m);
  auto samples = psi.samples();
  prop.step(samples);
  return WaveFunction(psi.box(), psi.hbar(), std::move(samples));
}

Trajectory<WaveFunction> schrodinger_evolve(const WaveFunction& psi, const Potential& v, const EvolutionConfig& cfg,
                                            const FrameSink<WaveFunction>& sink) {
  cfg.validate();
  check_step_resolution(psi, v, cfg.dt, cfg.mass);
  SplitStepPropagator prop(psi.box(), v, psi.hbar(), cfg.dt, cfg.mass);
  Trajectory<WaveFunction> traj;
  auto samples = psi.samples();
  record(traj, sink, 0.0, psi);
  const std::size_t n = cfg.steps();
  for (std::size_t s = 1; s <= n; ++s) {
    prop.step(samples);
    if (s % cfg.record_stride == 0)
      record(traj, sink, static_cast<double>(s) * cfg.dt, WaveFunction(psi.box(), psi.hbar(), samples));
  }
  return traj;
}

Trajectory<QuantumState> von_neumann_evolve(const QuantumState& s, const Potential& v, const EvolutionConfig& cfg,
                                            const FrameSink<QuantumState>& sink) {
  cfg.validate();
  for (const auto& w : s.waves()) check_step_resolution(w, v, cfg.dt, cfg.mass);
  SplitStepPropagator prop(s.box(), v, s.hbar(), cfg.dt, cfg.mass);
  const std::size_t n = cfg.steps();
  const std::size_t frames = n / cfg.record_stride + 1;
  const std::size_t rank = s.rank();

  // samples[j][f]: eigenfunction j at recorded frame f
  std::vector<std::vector<std::vector<cplx>>> samples(rank, std::vector<std::vector<cplx>>(frames));
  parallel_for(rank, [&](std::size_t j) {
    auto psi = s.waves()[j].samples();
    samples[j][0] = psi;
    for (std::size_t step = 1; step <= n; ++step) {
      prop.step(psi);
      if (step % cfg.record_stride == 0) samples[j][step / cfg.record_stride] = psi;
    }
  });

  Trajectory<QuantumState> traj;
  for (std::size_t f = 0; f < frames; ++f) {
    std::vector<WaveFunction> waves;
    waves.reserve(rank);
    for (std::size_t j = 0; j < rank; ++j) waves.emplace_back(s.box(), s.hbar(), std::move(samples[j][f]));
    record(traj, sink, static_cast<double>(f * cfg.record_stride) * cfg.dt, QuantumState(s.weights(), std::move(waves)));
  }
  return traj;
}

// ---- Wigner backend -------------------------------------------------------------------------

cplx delta_V(const Potential& v, double x, double y, double hbar) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  const double dv = v(x + 0.5 * hbar * y) - v(x - 0.5 * hbar * y);
  return {0.0, -dv / hbar};
}

Array2<cplx> delta_field(const Potential& v, const PhaseGrid& g, double hbar) {
  Array2<cplx> d(g.xgrid.n(), g.ygrid.n());
  for (std::size_t i = 0; i < d.rows; ++i)
    for (std::size_t c = 0; c < d.cols; ++c) d(i, c) = delta_V(v, g.xgrid.node(i), g.ygrid.node(c), hbar);
  return d;
}

Array2<cplx> k_kernel(const Potential& v, const PhaseGrid& g, double hbar) {
  auto k = delta_field(v, g, hbar);
  fft::forward_axis(k, g.ygrid, 1);
  for (auto& z : k.data) z /= kTwoPi;
  return k;
}

WignerField theta_apply(const WignerField& w, const Potential& v) {
  auto a = complexify(w);
  for (auto& z : a.data) z *= kTwoPi;
  fft::inverse_axis(a, w.grid.ygrid, 1);
  const auto d = delta_field(v, w.grid, w.hbar);
  for (std::size_t i = 0; i < a.size(); ++i) a.data[i] *= d.data[i];
  fft::forward_axis(a, w.grid.ygrid, 1);
  for (auto& z : a.data) z /= kTwoPi;
  return realify(w.grid, w.hbar, a);
}

double stable_time_step(const WignerField& w, const Potential& v, double m) {
  const auto& g = w.grid;
  const std::size_t nx = g.xgrid.n(), ny = g.ygrid.n();
  auto a = complexify(w);
  fft::execute_axis(a.data.data(), {nx, ny}, 0, fft::Direction::forward);
  std::vector<double> mag(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mag[i] = std::abs(a.data[i]);
  const double band = relative_threshold_max(mag, kBandThreshold);
  double kxi = 0.0;
  for (std::size_t r = 0; r < nx; ++r)
    for (std::size_t c = 0; c < ny; ++c)
      if (mag[r * ny + c] > band)
        kxi = std::max(kxi, std::abs(fft::fft_wavenumber(r, g.xgrid) * g.xigrid.frequency(c)));

  const auto k = kernel_from_wigner(w);
  for (std::size_t i = 0; i < k.values.size(); ++i) mag[i] = std::abs(k.values.data[i]);
  const double floor = relative_threshold_max(mag, kSupportThreshold);
  double dvmax = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t c = 0; c < ny; ++c)
      if (mag[i * ny + c] > floor)
        dvmax = std::max(dvmax, std::abs(delta_V(v, g.xgrid.node(i), g.ygrid.node(c), w.hbar)));

  double limit = std::numeric_limits<double>::infinity();
  if (kxi > 0.0) limit = std::min(limit, kMaxPhase * 2.0 * m / kxi);
  if (dvmax > 0.0) limit = std::min(limit, kMaxPhase / dvmax);
  return limit;
}

WignerField wigner_step(const WignerField& w, const Potential& v, double dt, double m) {
  require_stable(dt, stable_time_step(w, v, m), "wigner step");
  WignerStepper stepper(w.grid, v, w.hbar, dt, m);
  auto a = complexify(w);
  stepper.step(a);
  return realify(w.grid, w.hbar, a);
}

Trajectory<WignerField> wigner_evolve(const WignerField& w0, const Potential& v, const EvolutionConfig& cfg,
                                      const FrameSink<WignerField>& sink) {
  cfg.validate();
  require_stable(cfg.dt, stable_time_step(w0, v, cfg.mass), "wigner step");
  WignerStepper stepper(w0.grid, v, w0.hbar, cfg.dt, cfg.mass);
  Trajectory<WignerField> traj;
  auto a = complexify(w0);
  record(traj, sink, 0.0, w0);
  const std::size_t n = cfg.steps();
  for (std::size_t s = 1; s <= n; ++s) {
    stepper.step(a);
    if (s % cfg.record_stride == 0) record(traj, sink, static_cast<double>(s) * cfg.dt, realify(w0.grid, w0.hbar, a));
  }
  return traj;
}

Trajectory<WignerField> evolve_wigner_frames(const QuantumState& s, const Potential& v, const EvolutionConfig& cfg,
                                             std::optional<PhaseGrid> grid) {
  Trajectory<WignerField> out;
  switch (cfg.backend) {
    case Backend::schrodinger: {
      if (s.rank() != 1) throw InvalidParameter("the schrodinger backend evolves rank-one states only");
      auto traj = schrodinger_evolve(s.waves().front(), v, cfg);
      out.times = traj.times;
      out.frames.reserve(traj.size());
      for (auto& f : traj.frames) out.frames.push_back(wigner_transform(QuantumState(std::move(f)), grid));
      return out;
    }
    case Backend::von_neumann: {
      auto traj = von_neumann_evolve(s, v, cfg);
      out.times = traj.times;
      out.frames.resize(traj.size(), WignerField{grid ? *grid : PhaseGrid::for_hbar(s.grid(), s.hbar()), s.hbar(), {}});
      parallel_for(traj.size(), [&](std::size_t f) { out.frames[f] = wigner_transform(traj.frames[f], grid); });
      return out;
    }
    case Backend::wigner:
      return wigner_evolve(wigner_transform(s, grid), v, cfg);
  }
  throw InvalidParameter("unknown backend");
}

LKernelReport l_kernel_check(const Potential& v, const PhaseGrid& g, double hbar) {
  if (!v.lipschitz) throw MetadataError("l_kernel_check needs a declared Lipschitz constant");
  const std::size_t nx = g.xgrid.n(), ny = g.ygrid.n();
  const std::size_t y0 = g.y_zero_index();
  LKernelReport rep;
  rep.lipschitz = *v.lipschitz;
  rep.symbol_min = std::numeric_limits<double>::infinity();

  // y-space symbols: delta[V] for K, and (V+ - V-)/(hbar y) for L (limit V'(x) at y = 0).
  Array2<cplx> lsym(nx, ny), delta = delta_field(v, g, hbar);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = g.xgrid.node(i);
    for (std::size_t c = 0; c < ny; ++c) {
      const double y = g.ygrid.node(c);
      if (c == y0) {
        lsym(i, c) = v.gradient(x);
        continue;
      }
      const double s = (v(x + 0.5 * hbar * y) - v(x - 0.5 * hbar * y)) / (hbar * y);
      lsym(i, c) = s;
      rep.symbol_max = std::max(rep.symbol_max, std::abs(s));
      rep.symbol_min = std::min(rep.symbol_min, std::abs(s));
    }
  }

  // L on the xi grid, then its xi-derivative through the dual variable: d_xi <-> multiplication by -i y.
  Array2<cplx> l = lsym;
  fft::forward_axis(l, g.ygrid, 1);
  for (auto& z : l.data) z /= kTwoPi;
  Array2<cplx> dl = l;
  for (auto& z : dl.data) z *= kTwoPi;
  fft::inverse_axis(dl, g.ygrid, 1);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t c = 0; c < ny; ++c) dl(i, c) *= cplx(0.0, -g.ygrid.node(c));
  fft::forward_axis(dl, g.ygrid, 1);
  for (auto& z : dl.data) z /= kTwoPi;

  Array2<cplx> k = std::move(delta);
  fft::forward_axis(k, g.ygrid, 1);
  for (auto& z : k.data) z /= kTwoPi;
  double kmax = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    kmax = std::max(kmax, std::abs(k.data[i]));
    diff = std::max(diff, std::abs(dl.data[i] - k.data[i]));
  }
  rep.divergence_residual = kmax > 0.0 ? diff / kmax : diff;

  if (rep.symbol_max > rep.lipschitz * (1.0 + 1e-9) + 1e-12) {
    std::ostringstream msg;
    msg << "declared Lipschitz constant " << rep.lipschitz << " is exceeded: |delta[V]|/|y| reaches "
        << rep.symbol_max;
    throw MetadataError(msg.str());
  }
  return rep;
}

}  // namespace semiwig
