#include "semiwig/purity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semiwig/error.hpp"
#include "semiwig/fft.hpp"
#include "semiwig/states.hpp"

namespace semiwig {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Array2<std::uint8_t> smallness_mask(const Array2<cplx>& f, double tau) {
  double top = 0.0;
  for (const auto& z : f.data) top = std::max(top, std::abs(z));
  Array2<std::uint8_t> mask(f.rows, f.cols, 0);
  for (std::size_t i = 0; i < f.size(); ++i) mask.data[i] = std::abs(f.data[i]) > tau * top ? 1 : 0;
  return mask;
}

// sqrt(rho(x + hbar y/2) rho(x - hbar y/2)), rho read off the diagonal and shifted spectrally.
Array2<double> envelope(const KernelJet& jet) {
  const auto& g = jet.grid;
  const std::size_t nx = g.xgrid.n(), ny = g.ygrid.n(), y0 = g.y_zero_index();
  std::vector<cplx> rho(nx);
  for (std::size_t i = 0; i < nx; ++i) rho[i] = jet.f(i, y0).real();
  const auto spec = fft::spectrum_of(rho);
  std::vector<cplx> plus(nx), minus(nx);
  Array2<double> env(nx, ny);
  for (std::size_t c = 0; c < ny; ++c) {
    const double shift = 0.5 * jet.hbar * g.ygrid.node(c);
    fft::shifted_from_spectrum(g.xgrid, spec, shift, plus);
    fft::shifted_from_spectrum(g.xgrid, spec, -shift, minus);
    for (std::size_t i = 0; i < nx; ++i)
      env(i, c) = std::sqrt(std::max(plus[i].real(), 0.0) * std::max(minus[i].real(), 0.0));
  }
  return env;
}

struct LogCurvatures {
  cplx yy;  // (4/hbar^2) d_y(f_y/f)
  cplx xx;  // d_x(f_x/f)
};

LogCurvatures curvatures(const KernelJet& jet, std::size_t i) {
  const cplx f = jet.f.data[i];
  const cplx qy = jet.fy.data[i] / f, qx = jet.fx.data[i] / f;
  const double s = 4.0 / (jet.hbar * jet.hbar);
  return {s * (jet.fyy.data[i] / f - qy * qy), jet.fxx.data[i] / f - qx * qx};
}

double curvature_floor(const KernelJet& jet) {
  const double k = kTwoPi / jet.grid.xgrid.length();
  return k * k;
}

}  // namespace

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pure: return "pure";
    case Verdict::mixed: return "mixed";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

KernelJet kernel_jet(const KernelField& k) {
  KernelJet jet{k.grid, k.hbar, k.values, k.values, k.values, k.values, k.values, k.values};
  fft::derivative_axis(jet.fx, k.grid.xgrid, 0, 1);
  fft::derivative_axis(jet.fxx, k.grid.xgrid, 0, 2);
  fft::derivative_axis(jet.fy, k.grid.ygrid, 1, 1);
  fft::derivative_axis(jet.fyy, k.grid.ygrid, 1, 2);
  fft::derivative_axis(jet.fxy, k.grid.xgrid, 0, 1);
  fft::derivative_axis(jet.fxy, k.grid.ygrid, 1, 1);
  return jet;
}

KernelJet kernel_jet(const QuantumState& s, std::optional<PhaseGrid> grid) {
  const PhaseGrid pg = grid ? *grid : PhaseGrid::for_hbar(s.grid(), s.hbar());
  const double h = s.hbar();
  auto K = [&](int a, int b) { return derivative_kernel(s, a, b, pg).values; };
  const auto k00 = K(0, 0), k10 = K(1, 0), k01 = K(0, 1), k20 = K(2, 0), k11 = K(1, 1), k02 = K(0, 2);
  KernelJet jet{pg, h, k00, k00, k00, k00, k00, k00};
  for (std::size_t i = 0; i < k00.size(); ++i) {
    jet.fx.data[i] = k10.data[i] + k01.data[i];
    jet.fy.data[i] = 0.5 * h * (k10.data[i] - k01.data[i]);
    jet.fxx.data[i] = k20.data[i] + 2.0 * k11.data[i] + k02.data[i];
    jet.fyy.data[i] = 0.25 * h * h * (k20.data[i] - 2.0 * k11.data[i] + k02.data[i]);
    jet.fxy.data[i] = 0.5 * h * (k20.data[i] - k02.data[i]);
  }
  return jet;
}

PurityReport tatarskii_residuals(const KernelJet& jet, const PurityOptions& opts) {
  const std::size_t nx = jet.f.rows, ny = jet.f.cols;
  PurityReport rep{Array2<double>(nx, ny, 0.0), smallness_mask(jet.f, opts.tau)};
  const double floor = curvature_floor(jet);
  for (std::size_t i = 0; i < jet.f.size(); ++i) {
    if (!rep.mask.data[i]) continue;
    const auto c = curvatures(jet, i);
    const double r = std::abs(c.yy - c.xx) / (std::abs(c.yy) + std::abs(c.xx) + floor);
    rep.residual_grid.data[i] = r;
    rep.max_residual = std::max(rep.max_residual, r);
  }

  const auto env = envelope(jet);
  const double env_top = *std::max_element(env.data.begin(), env.data.end());
  std::size_t support = 0, masked = 0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env.data[i] <= opts.tau * env_top) continue;
    ++support;
    if (!rep.mask.data[i]) ++masked;
  }
  rep.masked_fraction = support ? static_cast<double>(masked) / static_cast<double>(support) : 1.0;

  double hs = 0.0, tr = 0.0;
  for (const auto& z : jet.f.data) hs += std::norm(z);
  hs *= jet.grid.xgrid.spacing() * jet.grid.ygrid.spacing() * jet.hbar;
  for (std::size_t i = 0; i < nx; ++i) tr += jet.f(i, jet.grid.y_zero_index()).real();
  tr *= jet.grid.xgrid.spacing();
  rep.spectral_purity = hs / (tr * tr);

  if (rep.masked_fraction > 0.5)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = rep.max_residual <= opts.pure_tolerance ? Verdict::pure : Verdict::mixed;
  return rep;
}

PurityReport tatarskii_residuals(const KernelField& k, const PurityOptions& opts) {
  return tatarskii_residuals(kernel_jet(k), opts);
}

PurityReport tatarskii_residuals(const QuantumState& s, const PurityOptions& opts) {
  auto rep = tatarskii_residuals(kernel_jet(s), opts);
  double sum = 0.0;
  for (double w : s.weights()) sum += w;
  rep.spectral_purity = hilbert_schmidt_trace(s) / (sum * sum);
  return rep;
}

WaveFormResidual wave_form_residual_1d(const KernelJet& jet, const PurityOptions& opts) {
  const std::size_t nx = jet.f.rows, ny = jet.f.cols;
  WaveFormResidual out{Array2<double>(nx, ny, 0.0), Array2<double>(nx, ny, 0.0), Array2<double>(nx, ny, 0.0),
                       Array2<std::uint8_t>(nx, ny, 0)};
  const auto mask = smallness_mask(jet.f, opts.tau);
  const double floor = curvature_floor(jet);
  const double s = 4.0 / (jet.hbar * jet.hbar);
  for (std::size_t i = 0; i < jet.f.size(); ++i) {
    if (!mask.data[i]) {
      out.inconclusive.data[i] = 1;
      continue;
    }
    const cplx f = jet.f.data[i];
    // d^2 log|F| = Re(F''/F) - Re(F'/F)^2 + Im(F'/F)^2 ; d^2 arg F = Im(F''/F) - 2 Re(F'/F) Im(F'/F)
    const cplx qy = jet.fy.data[i] / f, qx = jet.fx.data[i] / f;
    const cplx sy = jet.fyy.data[i] / f, sx = jet.fxx.data[i] / f;
    const double amp_y = sy.real() - qy.real() * qy.real() + qy.imag() * qy.imag();
    const double amp_x = sx.real() - qx.real() * qx.real() + qx.imag() * qx.imag();
    const double ph_y = sy.imag() - 2.0 * qy.real() * qy.imag();
    const double ph_x = sx.imag() - 2.0 * qx.real() * qx.imag();
    const double scale = std::hypot(s * amp_y, s * ph_y) + std::hypot(amp_x, ph_x) + floor;
    out.amplitude.data[i] = std::abs(s * amp_y - amp_x) / scale;
    out.phase.data[i] = std::abs(s * ph_y - ph_x) / scale;
    out.combined.data[i] = std::hypot(out.amplitude.data[i], out.phase.data[i]);
    out.max_combined = std::max(out.max_combined, out.combined.data[i]);
  }
  return out;
}

WaveFormResidual wave_form_residual_1d(const KernelField& k, const PurityOptions& opts) {
  return wave_form_residual_1d(kernel_jet(k), opts);
}

ClosureResidual closure_residual(const KernelJet& jet, const PurityOptions& opts) {
  const std::size_t nx = jet.f.rows, ny = jet.f.cols;
  ClosureResidual out{Array2<double>(nx, ny, 0.0)};
  const auto mask = smallness_mask(jet.f, opts.tau);
  const double q = 0.25 * jet.hbar * jet.hbar;
  for (std::size_t i = 0; i < jet.f.size(); ++i) {
    if (!mask.data[i]) continue;
    const cplx f = jet.f.data[i];
    const cplx t1 = jet.fyy.data[i];
    const cplx t2 = jet.fy.data[i] * jet.fy.data[i] / f;
    const cplx t3 = q * jet.fxx.data[i];
    const cplx t4 = q * jet.fx.data[i] * jet.fx.data[i] / f;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    const double r = scale > 0.0 ? std::abs(t1 - t2 - t3 + t4) / scale : 0.0;
    out.residual.data[i] = r;
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

ClosureTrace closure_trace(const KernelJet& jet, double m) {
  if (!(m > 0.0)) throw InvalidParameter("mass must be positive");
  const std::size_t nx = jet.f.rows, y0 = jet.grid.y_zero_index();
  const double h2 = jet.hbar * jet.hbar;
  ClosureTrace out{std::vector<double>(nx), std::vector<double>(nx)};
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double rho = jet.f(i, y0).real();
    const double drho = jet.fx(i, y0).real();
    const double d2rho = jet.fxx(i, y0).real();
    const cplx fy = jet.fy(i, y0);
    // R~_y(x,0) = i m J and R~_yy(x,0) = -2 m E.
    out.lhs[i] = -rho * jet.fyy(i, y0).real() + (fy * fy).real();
    out.rhs[i] = -h2 / 8.0 * (2.0 * rho * d2rho + 2.0 * drho * drho) + 0.5 * h2 * drho * drho;
    diff += std::abs(out.lhs[i] - out.rhs[i]);
    norm += std::abs(out.rhs[i]);
  }
  out.relative_l1 = norm > 0.0 ? diff / norm : diff;
  return out;
}

double spectral_purity(const KernelField& k) {
  double hs = 0.0, tr = 0.0;
  for (const auto& z : k.values.data) hs += std::norm(z);
  hs *= k.grid.xgrid.spacing() * k.grid.ygrid.spacing() * k.hbar;
  for (std::size_t i = 0; i < k.values.rows; ++i) tr += k.values(i, k.grid.y_zero_index()).real();
  tr *= k.grid.xgrid.spacing();
  return hs / (tr * tr);
}

}  // namespace semiwig
