#include "semiwig/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "semiwig/error.hpp"
#include "semiwig/expression.hpp"
#include "semiwig/fft.hpp"
#include "semiwig/parallel.hpp"

namespace semiwig {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

void check_cutoff_resolution(const FrequencyGrid& xi, const Cutoff& psi) {
  if (psi.untruncated) return;
  double top = 0.0, err = 0.0;
  for (std::size_t c = 0; c < xi.n(); ++c) top = std::max(top, std::abs(psi(xi.frequency(c))));
  for (std::size_t c = 0; c + 1 < xi.n(); ++c) {
    const double a = xi.frequency(c), b = xi.frequency(c + 1);
    err = std::max(err, std::abs(psi(0.5 * (a + b)) - 0.5 * (psi(a) + psi(b))));
  }
  if (top > 0.0 && err > 1e-2 * top) {
    std::ostringstream msg;
    msg << "cutoff '" << psi.description << "' is not resolved by the xi spacing " << xi.spacing()
        << " (midpoint error " << err / top << " of its maximum)";
    throw ResolutionError(msg.str());
  }
}

// Cosine roll-off over a fraction `a` at both ends of n samples.
std::vector<double> taper_weights(std::size_t n, double a) {
  std::vector<double> w(n, 1.0);
  if (a <= 0.0 || n < 3) return w;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(n - 1);
    const double e = std::min(u, 1.0 - u);
    if (e < a) w[j] = 0.5 * (1.0 - std::cos(kPi * e / a));
  }
  return w;
}

double wavenumber(std::size_t j, std::size_t n, double length) {
  const long idx = j < (n + 1) / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
  return kTwoPi * static_cast<double>(idx) / length;
}

double kernel_l2_squared(const KernelField& k) {
  double s = 0.0;
  for (const auto& z : k.values.data) s += std::norm(z);
  return s * k.grid.xgrid.spacing() * k.grid.ygrid.spacing();
}

std::vector<double> density_row(const KernelField& k) {
  const std::size_t y0 = k.grid.y_zero_index();
  std::vector<double> rho(k.values.rows);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = k.values(i, y0).real();
  return rho;
}

}  // namespace

Cutoff Cutoff::gaussian(double width) {
  if (!(width > 0.0)) throw InvalidParameter("cutoff width must be positive");
  std::ostringstream d;
  d << "gaussian(width=" << width << ")";
  return Cutoff{[width](double xi) { return std::exp(-0.5 * xi * xi / (width * width)); }, false, d.str()};
}

Cutoff Cutoff::unit() { return Cutoff{[](double) { return 1.0; }, true, "untruncated density"}; }

Cutoff Cutoff::monomial(int power) {
  if (power < 0) throw InvalidParameter("monomial cutoff needs a nonnegative power");
  if (power == 0) return unit();
  return Cutoff{[power](double xi) { return std::pow(xi, power); }, false, "xi^" + std::to_string(power)};
}

Cutoff Cutoff::from_expression(const std::string& text) {
  auto e = std::make_shared<Expression>(Expression::parse(text, {"xi"}));
  return Cutoff{[e](double xi) { return (*e)(xi); }, false, text};
}

std::vector<double> velocity_average(const WignerField& w, const Cutoff& psi) {
  const auto& xi = w.grid.xigrid;
  check_cutoff_resolution(xi, psi);
  std::vector<double> weights(xi.n());
  for (std::size_t c = 0; c < xi.n(); ++c) weights[c] = psi(xi.frequency(c)) * xi.spacing();
  std::vector<double> out(w.values.rows, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* row = w.values.row(i);
    double s = 0.0;
    for (std::size_t c = 0; c < xi.n(); ++c) s += row[c] * weights[c];
    out[i] = s;
  }
  return out;
}

SpaceTimeField velocity_average(const Trajectory<WignerField>& traj, const Cutoff& psi) {
  if (traj.frames.empty()) throw InvalidParameter("empty trajectory");
  const auto& g = traj.frames.front().grid.xgrid;
  SpaceTimeField f{traj.times, g, Array2<double>(traj.size(), g.n()), psi.untruncated};
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto row = velocity_average(traj.frames[t], psi);
    std::copy(row.begin(), row.end(), f.values.row(t));
  }
  return f;
}

double hs_norm(const SpaceTimeField& f, double s, double taper) {
  if (s < 0.0 || s > 1.0) throw InvalidParameter("Sobolev order must lie in [0, 1]");
  const std::size_t nt = f.values.rows, nx = f.values.cols;
  if (nt == 0 || nx != f.xgrid.n()) throw InvalidParameter("space-time field shape mismatch");
  const double dt = nt > 1 ? f.time_step() : 1.0;
  const double dx = f.xgrid.spacing();
  const auto wt = nt > 1 ? taper_weights(nt, taper) : std::vector<double>(1, 1.0);
  const auto wx = taper_weights(nx, taper);

  Array2<cplx> a(nt, nx);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t i = 0; i < nx; ++i) a(t, i) = f.values(t, i) * wt[t] * wx[i];
  const std::vector<std::size_t> shape{nt, nx};
  fft::execute_all(a.data.data(), shape, fft::Direction::forward);

  const double period_t = static_cast<double>(nt) * dt;
  double sum = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    const double tau = nt > 1 ? wavenumber(t, nt, period_t) : 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double kappa = fft::fft_wavenumber(i, f.xgrid);
      sum += std::pow(1.0 + tau * tau + kappa * kappa, s) * std::norm(a(t, i));
    }
  }
  const double cell = (nt > 1 ? dt : 1.0) * dx / static_cast<double>(nt * nx);
  return std::sqrt(sum * cell);
}

double hs_norm(const SpatialGrid& g, const std::vector<double>& f, double s) {
  SpaceTimeField st{{0.0}, g, Array2<double>(1, g.n())};
  st.values.data = f;
  return hs_norm(st, s, 0.0);
}

double homogeneous_hs_norm(const SpatialGrid& g, const std::vector<double>& f, double s) {
  std::vector<cplx> a(f.begin(), f.end());
  fft::execute_all(a.data(), {g.n()}, fft::Direction::forward);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = std::abs(fft::fft_wavenumber(i, g));
    if (k > 0.0) sum += std::pow(k, 2.0 * s) * std::norm(a[i]);
  }
  return std::sqrt(sum * g.spacing() / static_cast<double>(g.n()));
}

FamilyMember averaged_member(const QuantumState& s, const Potential& v, const EvolutionConfig& cfg,
                             const Cutoff& psi, std::optional<PhaseGrid> grid) {
  const auto traj = evolve_wigner_frames(s, v, cfg, grid);
  return FamilyMember{s.hbar(), hilbert_schmidt_trace(s), s.dim(), velocity_average(traj, psi)};
}

void require_geometric(const std::vector<double>& hbars, std::size_t min_points) {
  if (hbars.size() < min_points) {
    throw InvalidSweep("an hbar sweep needs at least " + std::to_string(min_points) + " values, got " +
                       std::to_string(hbars.size()));
  }
  for (double h : hbars)
    if (!(h > 0.0)) throw InvalidSweep("hbar values must be positive");
  const double r = hbars[1] / hbars[0];
  if (std::abs(r - 1.0) < 1e-12) throw InvalidSweep("hbar values must be distinct");
  for (std::size_t i = 1; i < hbars.size(); ++i) {
    const double ri = hbars[i] / hbars[i - 1];
    if (std::abs(ri - r) > 1e-6 * std::abs(r)) {
      std::ostringstream msg;
      msg << "hbar list is not geometric: ratio " << ri << " at position " << i << " differs from " << r;
      throw InvalidSweep(msg.str());
    }
  }
}

SobolevReport check_uniform_bound(const std::vector<FamilyMember>& family, double s, double beta,
                                  const BoundOptions& opts) {
  std::vector<double> hbars;
  for (const auto& m : family) hbars.push_back(m.hbar);
  require_geometric(hbars);

  SobolevReport rep{s, beta, std::vector<SobolevRow>(family.size()), {}, 0.0, 0.0, true, false, false};
  parallel_for(family.size(), [&](std::size_t i) {
    const auto& m = family[i];
    const double cell = std::pow(kTwoPi * m.hbar, static_cast<double>(m.dim));
    const double norm = hs_norm(m.field, s, opts.taper);
    const double required = std::sqrt(m.purity / cell);
    rep.rows[i] = SobolevRow{m.hbar, norm, std::pow(m.hbar, beta) * norm, required,
                             m.purity <= opts.C * opts.C * cell * (1.0 + 1e-9)};
  });

  std::vector<double> weighted;
  for (const auto& r : rep.rows) {
    weighted.push_back(r.weighted);
    rep.required_C = std::max(rep.required_C, r.required_C);
    rep.hypothesis_ok = rep.hypothesis_ok && r.hypothesis_ok;
  }
  if (!rep.hypothesis_ok && opts.mode == HypothesisMode::enforce) {
    std::ostringstream msg;
    msg << "family violates tr(R^2) <= C^2 (2 pi hbar)^d with C = " << opts.C << " (needs C >= " << rep.required_C
        << ")";
    throw HypothesisViolation(msg.str());
  }
  rep.fit = fit_loglog(hbars, weighted);
  const auto [lo, hi] = std::minmax_element(weighted.begin(), weighted.end());
  rep.spread = *hi / *lo;
  rep.bounded = rep.fit.slope >= opts.bounded_slope && rep.spread < opts.bounded_spread;
  rep.grows = rep.fit.slope <= opts.growth_slope;
  return rep;
}

// ---- one-dimensional kernel estimates ----------------------------------------------------------

double gamma_k(unsigned k) {
  return std::pow(2.0, k) * std::tgamma(static_cast<double>(k) + 1.0) /
         ((2.0 * k + 1.0) * std::sqrt(kTwoPi));
}

MollifierReport mollifier_machinery(const Array2<cplx>& f, const std::vector<Array2<cplx>>& b,
                                    const FrequencyGrid& xi, const SpatialGrid& y) {
  if (!y.is_centered()) throw InvalidParameter("mollifier_machinery needs a centered y grid");
  if (f.rows != xi.n() || f.cols != y.n()) throw InvalidParameter("f does not match the (xi, y) grids");
  for (const auto& bk : b)
    if (bk.rows != f.rows || bk.cols != f.cols) throw InvalidParameter("source shape mismatch");
  if (b.empty()) throw InvalidParameter("at least one source b_0 is required");
  const std::size_t n = b.size() - 1;
  const std::size_t ny = y.n(), y0 = ny / 2;
  const double dy = y.spacing();

  MollifierReport rep;
  for (std::size_t r = 0; r < f.rows; ++r) {
    const double x = xi.frequency(r);
    const double ax = std::abs(x);
    if (ax == 0.0) continue;
    const double eps = ax >= 1.0 ? std::pow(ax, -1.0 / static_cast<double>(n + 1)) : 1.0 / ax;

    double fnorm = 0.0;
    for (std::size_t c = 0; c < ny; ++c) fnorm += std::norm(f(r, c));
    fnorm *= dy;
    double rhs = eps / (2.0 * std::sqrt(kPi)) * fnorm;
    for (std::size_t k = 0; k <= n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      // beta_k on (0, inf): trapezoid weight 1/2 at z = 0.
      double bn = 0.5 * std::norm(b[k](r, y0) - sign * b[k](r, y0));
      for (std::size_t j = 1; j < y0; ++j) bn += std::norm(b[k](r, y0 + j) - sign * b[k](r, y0 - j));
      bn *= dy;
      rhs += gamma_k(static_cast<unsigned>(k)) * std::pow(eps, -(2.0 * k + 1.0)) / (ax * ax) * bn;
    }
    const double lhs = std::norm(f(r, y0)) / static_cast<double>(n + 2);
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.rows.push_back(MollifierRow{x, eps, lhs, rhs, ratio});
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
  }
  return rep;
}

Array2<cplx> transport_source(const KernelField& k) {
  Array2<cplx> a = k.values;
  fft::derivative_axis(a, k.grid.xgrid, 0, 1);
  fft::derivative_axis(a, k.grid.ygrid, 1, 1);
  for (auto& z : a.data) z *= cplx(0.0, -1.0);
  return a;
}

std::vector<Array2<cplx>> stationary_polynomial_sources(const KernelField& k, const std::vector<double>& coeffs,
                                                        double m, std::size_t n) {
  const std::size_t nx = k.values.rows, ny = k.values.cols;
  const double hbar = k.hbar;
  const std::size_t deg = coeffs.empty() ? 0 : coeffs.size() - 1;
  auto binom = [](std::size_t a, std::size_t b) {
    double r = 1.0;
    for (std::size_t i = 1; i <= b; ++i) r = r * static_cast<double>(a - b + i) / static_cast<double>(i);
    return r;
  };
  // m delta[V](x, y) = sum_l m d_l(x) y^l, odd l only.
  auto d_coeff = [&](std::size_t l, double x) {
    cplx acc = 0.0;
    for (std::size_t j = l; j <= deg; ++j)
      acc += coeffs[j] * binom(j, l) * std::pow(x, static_cast<double>(j - l)) * std::pow(0.5 * hbar, static_cast<double>(l));
    return cplx(0.0, -2.0 / hbar) * acc * m;
  };

  std::vector<Array2<cplx>> u(n + 1, Array2<cplx>(nx, ny));
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = k.grid.xgrid.node(i);
    for (std::size_t l = 1; l <= deg; l += 2) {
      const cplx d = d_coeff(l, x);
      if (d == cplx(0.0)) continue;
      const std::size_t slot = std::min(l, n);
      for (std::size_t c = 0; c < ny; ++c) {
        const double y = k.grid.ygrid.node(c);
        u[slot](i, c) += d * std::pow(y, static_cast<double>(l - slot)) * k.values(i, c);
      }
    }
  }
  return u;
}

double decomposition_residual(const KernelField& k, const std::vector<Array2<cplx>>& u) {
  const auto a = transport_source(k);
  double top = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t c = 0; c < a.cols; ++c) {
      const double y = k.grid.ygrid.node(c);
      cplx sum = 0.0, p = 1.0;
      for (const auto& uk : u) {
        sum += uk(i, c) * p;
        p *= y;
      }
      top = std::max(top, std::abs(a(i, c)));
      worst = std::max(worst, std::abs(a(i, c) - sum));
    }
  }
  return top > 0.0 ? worst / top : worst;
}

DensitySobolevReport density_sobolev_1d(const KernelField& k, const std::vector<Array2<cplx>>& u, double tolerance) {
  if (u.empty()) throw InvalidDecomposition("at least one source u_0 is required");
  DensitySobolevReport rep{};
  rep.n = u.size() - 1;
  rep.s = 1.0 / (2.0 * static_cast<double>(rep.n + 1));
  rep.residual = decomposition_residual(k, u);
  if (rep.residual > tolerance) {
    std::ostringstream msg;
    msg << "sources do not reproduce d_y(-i d_x) R~: relative residual " << rep.residual << " > " << tolerance;
    throw InvalidDecomposition(msg.str());
  }
  const auto& xg = k.grid.xgrid;
  const auto rho = density_row(k);
  rep.lhs = hs_norm(xg, rho, rep.s);
  for (double r : rho) rep.trace += r;
  rep.trace *= xg.spacing();
  rep.kernel_norm = std::sqrt(kernel_l2_squared(k));

  const double dxi = kTwoPi / xg.length();
  const double dy = k.grid.ygrid.spacing();
  const double np2 = static_cast<double>(rep.n + 2);
  double chain = 4.0 / np2 * rep.trace * rep.trace + std::sqrt(kPi) * rep.kernel_norm * rep.kernel_norm;
  double literal_sum = 0.0;
  for (std::size_t j = 0; j <= rep.n; ++j) {
    Array2<cplx> bk = u[j];
    fft::forward_axis(bk, xg, 0);
    double nrm = 0.0;
    for (const auto& z : bk.data) nrm += std::norm(z);
    nrm *= dxi * dy;
    rep.source_norms.push_back(std::sqrt(nrm));
    chain += 2.0 * gamma_k(static_cast<unsigned>(j)) * nrm;
    literal_sum += nrm;
  }
  chain *= np2 / kPi;
  rep.rhs = std::sqrt(chain);
  rep.ratio = rep.lhs / rep.rhs;
  rep.literal_rhs = rep.trace + rep.kernel_norm * literal_sum;
  rep.empirical_constant = rep.literal_rhs > 0.0 ? rep.lhs / rep.literal_rhs : 0.0;
  rep.pass = rep.lhs <= rep.rhs;
  return rep;
}

HalfBound homogeneous_half_bound(const KernelField& k) {
  const auto rho = density_row(k);
  HalfBound h{};
  h.lhs = homogeneous_hs_norm(k.grid.xgrid, rho, 0.5);
  Array2<cplx> a = k.values;
  fft::derivative_axis(a, k.grid.xgrid, 0, 1);
  fft::derivative_axis(a, k.grid.ygrid, 1, 1);
  double d2 = 0.0;
  for (const auto& z : a.data) d2 += std::norm(z);
  d2 *= k.grid.xgrid.spacing() * k.grid.ygrid.spacing();
  h.product = std::sqrt(std::sqrt(kernel_l2_squared(k)) * std::sqrt(d2));
  h.ratio = h.product > 0.0 ? h.lhs / h.product : 0.0;
  return h;
}

}  // namespace semiwig
