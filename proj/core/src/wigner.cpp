#include "semiwig/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "semiwig/error.hpp"
#include "semiwig/fft.hpp"

namespace semiwig {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Samples psi(x_i + shift) for all nodes, reusing grid and half-grid copies when possible.
class ShiftedSampler {
 public:
  ShiftedSampler(const SpatialGrid& g, const std::vector<cplx>& psi)
      : g_(g), psi_(psi), spectrum_(fft::spectrum_of(psi)), half_(g.n()) {
    fft::shifted_from_spectrum(g_, spectrum_, 0.5 * g_.spacing(), half_);
  }

  void sample(double shift, std::vector<cplx>& out) const {
    const std::size_t n = g_.n();
    out.resize(n);
    const double t = shift / (0.5 * g_.spacing());
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9) {
      const long m = static_cast<long>(r);
      const long nl = static_cast<long>(n);
      const bool odd = (m % 2) != 0;
      // x_i + m dx/2 is node i + m/2 (m even) or half-node i + floor(m/2) (m odd).
      const long base = odd ? static_cast<long>(std::floor(static_cast<double>(m) / 2.0)) : m / 2;
      const auto& src = odd ? half_ : psi_;
      for (long i = 0; i < nl; ++i) {
        long idx = (i + base) % nl;
        if (idx < 0) idx += nl;
        out[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(idx)];
      }
      return;
    }
    fft::shifted_from_spectrum(g_, spectrum_, shift, out);
  }

 private:
  const SpatialGrid& g_;
  const std::vector<cplx>& psi_;
  std::vector<cplx> spectrum_;
  std::vector<cplx> half_;
};

void require_1d(const QuantumState& s, const char* what) {
  if (s.dim() != 1) throw InvalidParameter(std::string(what) + " supports d = 1 only");
}

// sum_j lambda_j psi_j^(a)(x + hbar y/2) conj(psi_j^(b)(x - hbar y/2)) on the phase grid.
Array2<cplx> bilinear_samples(const QuantumState& s, const PhaseGrid& pg, int a, int b) {
  const SpatialGrid& xg = s.grid();
  const std::size_t nx = xg.n(), ny = pg.ygrid.n();
  Array2<cplx> out(nx, ny);
  std::vector<cplx> plus, minus;
  for (std::size_t j = 0; j < s.rank(); ++j) {
    const double lam = s.weights()[j];
    if (lam == 0.0) continue;
    const auto& psi = s.waves()[j].samples();
    const std::vector<cplx> da = a == 0 ? psi : fft::derivative(xg, psi, a);
    const std::vector<cplx> db = b == 0 ? psi : fft::derivative(xg, psi, b);
    ShiftedSampler sa(xg, da);
    ShiftedSampler sb(xg, db);
    for (std::size_t c = 0; c < ny; ++c) {
      const double shift = 0.5 * s.hbar() * pg.ygrid.node(c);
      sa.sample(shift, plus);
      sb.sample(-shift, minus);
      for (std::size_t i = 0; i < nx; ++i) out(i, c) += lam * plus[i] * std::conj(minus[i]);
    }
  }
  return out;
}

}  // namespace

KernelField kernel_from_state(const QuantumState& s, std::optional<PhaseGrid> grid) {
  require_1d(s, "kernel_from_state");
  const SpatialGrid& xg = s.grid();
  PhaseGrid pg = grid ? *grid : PhaseGrid::for_hbar(xg, s.hbar());
  if (!(pg.xgrid == xg)) throw InvalidParameter("phase grid x axis differs from the state grid");
  const double hbar = s.hbar();
  const std::size_t nx = xg.n(), ny = pg.ygrid.n();

  const double reach = 0.5 * hbar * 0.5 * pg.ygrid.length();
  if (reach > 0.5 * xg.length()) {
    for (const auto& w : s.waves())
      if (boundary_amplitude(w) > 1e-12)
        throw ResolutionError("hbar*max|y|/2 exceeds the box half-width and the state has boundary mass");
  }

  KernelField k{pg, hbar, bilinear_samples(s, pg, 0, 0)};

  double kmax = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t c = 0; c < ny; ++c) kmax = std::max(kmax, std::abs(k.values(i, c)));
    edge = std::max(edge, std::abs(k.values(i, 0)));
  }
  if (edge > 1e-10 * kmax) {
    std::ostringstream msg;
    msg << "kernel has not decayed at the y-box edge (relative " << edge / kmax
        << "); the xi grid aliases";
    emit_warning(msg.str());
  }
  return k;
}

double hermitian_defect(const KernelField& k) {
  const std::size_t nx = k.values.rows, ny = k.values.cols;
  double worst = 0.0, kmax = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t c = 0; c < ny; ++c) {
      kmax = std::max(kmax, std::abs(k.values(i, c)));
      if (c == 0) continue;
      worst = std::max(worst, std::abs(k.values(i, ny - c) - std::conj(k.values(i, c))));
    }
  }
  return kmax > 0.0 ? worst / kmax : 0.0;
}

KernelField derivative_kernel(const QuantumState& s, int a, int b, std::optional<PhaseGrid> grid) {
  require_1d(s, "derivative_kernel");
  if (a < 0 || b < 0) throw InvalidParameter("derivative orders must be nonnegative");
  PhaseGrid pg = grid ? *grid : PhaseGrid::for_hbar(s.grid(), s.hbar());
  if (!(pg.xgrid == s.grid())) throw InvalidParameter("phase grid x axis differs from the state grid");
  return KernelField{pg, s.hbar(), bilinear_samples(s, pg, a, b)};
}

WignerField wigner_from_kernel(const KernelField& k) {
  const double defect = hermitian_defect(k);
  if (defect > 1e-6)
    throw InconsistencyError("kernel violates Hermitian symmetry (relative defect " + std::to_string(defect) + ")");
  Array2<cplx> a = k.values;
  fft::forward_axis(a, k.grid.ygrid, 1);
  WignerField w{k.grid, k.hbar, Array2<double>(a.rows, a.cols)};
  double imag = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cplx v = a.data[i] / kTwoPi;
    w.values.data[i] = v.real();
    imag = std::max(imag, std::abs(v.imag()));
  }
  w.max_imag = imag;
  return w;
}

KernelField kernel_from_wigner(const WignerField& w) {
  Array2<cplx> a(w.values.rows, w.values.cols);
  for (std::size_t i = 0; i < a.size(); ++i) a.data[i] = kTwoPi * w.values.data[i];
  fft::inverse_axis(a, w.grid.ygrid, 1);
  return KernelField{w.grid, w.hbar, std::move(a)};
}

WignerField wigner_transform(const QuantumState& s, std::optional<PhaseGrid> grid) {
  return wigner_from_kernel(kernel_from_state(s, std::move(grid)));
}

MomentFields moments_from_kernel(const KernelField& k, double m) {
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const std::size_t nx = k.values.rows;
  const std::size_t c0 = k.grid.y_zero_index();
  Array2<cplx> d1 = k.values, d2 = k.values;
  fft::derivative_axis(d1, k.grid.ygrid, 1, 1);
  fft::derivative_axis(d2, k.grid.ygrid, 1, 2);
  MomentFields mf{Box(k.grid.xgrid), m, std::vector<double>(nx), {std::vector<double>(nx)},
                  std::vector<double>(nx), std::nullopt};
  for (std::size_t i = 0; i < nx; ++i) {
    mf.rho[i] = k.values(i, c0).real();
    mf.current[0][i] = (cplx(0.0, -1.0 / m) * d1(i, c0)).real();
    mf.energy[i] = (-1.0 / (2 * m)) * d2(i, c0).real();
  }
  return mf;
}

MomentFields moments(const WignerField& w, double m) {
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const std::size_t nx = w.values.rows, nxi = w.values.cols;
  const double dxi = w.grid.xigrid.spacing();
  MomentFields mf{Box(w.grid.xgrid), m, std::vector<double>(nx, 0.0), {std::vector<double>(nx, 0.0)},
                  std::vector<double>(nx, 0.0), std::nullopt};
  double xi2max = 0.0;
  for (std::size_t c = 0; c < nxi; ++c) xi2max = std::max(xi2max, std::pow(w.grid.xigrid.frequency(c), 2));
  for (std::size_t i = 0; i < nx; ++i) {
    double r = 0.0, j = 0.0, e = 0.0;
    for (std::size_t c = 0; c < nxi; ++c) {
      const double xi = w.grid.xigrid.frequency(c);
      const double v = w.values(i, c);
      r += v;
      j += xi * v;
      e += xi * xi * v;
    }
    mf.rho[i] = r * dxi;
    mf.current[0][i] = j * dxi / m;
    mf.energy[i] = e * dxi / (2 * m);
  }

  const MomentFields ref = moments_from_kernel(kernel_from_wigner(w), m);
  double rmax = 0.0, abs_w = 0.0;
  for (double v : mf.rho) rmax = std::max(rmax, std::abs(v));
  for (double v : w.values.data) abs_w = std::max(abs_w, std::abs(v));
  // Natural scales of each moment: the xi weights reach |xi|max at most.
  const double sr = std::max(rmax, 1e-300);
  const double sj = sr * std::sqrt(xi2max) / m;
  const double se = sr * xi2max / (2 * m);
  for (std::size_t i = 0; i < nx; ++i) {
    const double er = std::abs(mf.rho[i] - ref.rho[i]) / sr;
    const double ej = std::abs(mf.current[0][i] - ref.current[0][i]) / sj;
    const double ee = std::abs(mf.energy[i] - ref.energy[i]) / se;
    if (er > 1e-8 || ej > 1e-8 || ee > 1e-8) {
      std::ostringstream msg;
      msg << "moment cross-check failed at x = " << w.grid.xgrid.node(i) << " (rel. errors " << er << ", "
          << ej << ", " << ee << ")";
      throw InconsistencyError(msg.str());
    }
  }
  return mf;
}

MomentFields moments_from_state(const QuantumState& s, double m) {
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const Box& b = s.box();
  const std::size_t n = b.size(), d = b.dim();
  const double hbar = s.hbar();
  MomentFields mf{b, m, std::vector<double>(n, 0.0), std::vector<std::vector<double>>(d, std::vector<double>(n, 0.0)),
                  std::vector<double>(n, 0.0), s.rank() == 1};
  for (std::size_t j = 0; j < s.rank(); ++j) {
    const double lam = s.weights()[j];
    const auto& psi = s.waves()[j].samples();
    std::vector<cplx> lap(n, 0.0);
    std::vector<double> grad2(n, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      auto g = fft::partial(b, std::span<const cplx>(psi), a, 1);
      auto g2 = fft::partial(b, std::span<const cplx>(psi), a, 2);
      for (std::size_t i = 0; i < n; ++i) {
        mf.current[a][i] += lam * (hbar / m) * (std::conj(psi[i]) * g[i]).imag();
        grad2[i] += std::norm(g[i]);
        lap[i] += g2[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      mf.rho[i] += lam * std::norm(psi[i]);
      mf.energy[i] += lam * hbar * hbar / (4 * m) * (grad2[i] - (std::conj(psi[i]) * lap[i]).real());
    }
  }
  return mf;
}

double total_mass(const WignerField& w) {
  double s = 0.0;
  for (double v : w.values.data) s += v;
  return s * w.grid.xgrid.spacing() * w.grid.xigrid.spacing();
}

double l2_norm_squared(const WignerField& w) {
  double s = 0.0;
  for (double v : w.values.data) s += v * v;
  return s * w.grid.xgrid.spacing() * w.grid.xigrid.spacing();
}

std::vector<double> rho_hat(const QuantumState& s) {
  const Box& b = s.box();
  const auto shape = b.shape();
  const std::size_t n = b.size();
  std::vector<double> out(n, 0.0);
  std::vector<cplx> buf(n);
  for (std::size_t j = 0; j < s.rank(); ++j) {
    const auto& psi = s.waves()[j].samples();
    for (std::size_t flat = 0; flat < n; ++flat) {
      std::size_t rem = flat, parity = 0;
      for (std::size_t a = shape.size(); a-- > 0;) {
        parity += rem % shape[a];
        rem /= shape[a];
      }
      buf[flat] = (parity % 2 == 0) ? psi[flat] : -psi[flat];
    }
    fft::execute_all(buf.data(), shape, fft::Direction::forward);
    const double dv = b.cell_volume();
    for (std::size_t flat = 0; flat < n; ++flat) out[flat] += s.weights()[j] * std::norm(buf[flat] * dv);
  }
  return out;
}

L2Identity l2_identity_check(const QuantumState& s) {
  const double lhs = l2_norm_squared(wigner_transform(s));
  const double rhs = hilbert_schmidt_trace(s) / std::pow(kTwoPi * s.hbar(), static_cast<double>(s.dim()));
  return {lhs, rhs, std::abs(lhs - rhs) / rhs};
}

TightnessReport tightness_and_oscillation(const std::vector<QuantumState>& family, double R, double m) {
  if (family.empty()) throw InvalidSweep("empty family");
  if (!(R > 0.0)) throw InvalidParameter("radius must be positive");
  TightnessReport rep{{}, true, true};
  const double radii[3] = {R, 2 * R, 4 * R};
  double worst_space[3] = {0, 0, 0}, worst_mom[3] = {0, 0, 0};
  for (const auto& s : family) {
    const Box& b = s.box();
    const auto rho = s.density();
    const auto rh = rho_hat(s);
    const auto mf = moments_from_state(s, m);
    double kinetic = 0.0;
    for (double e : mf.energy) kinetic += e;
    kinetic *= b.cell_volume();
    double dXi = 1.0;
    for (const auto& g : b.axes) dXi *= dual_grid(g).spacing();
    for (int r = 0; r < 3; ++r) {
      double st = 0.0, mt = 0.0;
      for (std::size_t flat = 0; flat < b.size(); ++flat) {
        const auto x = b.point(flat);
        double x2 = 0.0, k2 = 0.0;
        std::size_t rem = flat;
        for (std::size_t a = b.dim(); a-- > 0;) {
          const std::size_t n = b.axes[a].n();
          const double k = dual_grid(b.axes[a]).frequency(rem % n);
          rem /= n;
          k2 += k * k;
          x2 += x[a] * x[a];
        }
        if (std::sqrt(x2) > radii[r]) st += rho[flat];
        if (std::sqrt(k2) * s.hbar() > radii[r]) mt += rh[flat];
      }
      st *= b.cell_volume();
      mt *= dXi;
      worst_space[r] = std::max(worst_space[r], st);
      worst_mom[r] = std::max(worst_mom[r], mt);
      rep.rows.push_back({s.hbar(), radii[r], st, mt, kinetic});
    }
  }
  auto decays = [](const double* w) { return w[0] <= 1e-12 || w[2] < 0.5 * w[0]; };
  rep.spatially_tight = decays(worst_space);
  rep.hbar_oscillatory = decays(worst_mom);
  return rep;
}

}  // namespace semiwig
