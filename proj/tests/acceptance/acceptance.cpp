// Acceptance runner: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failing criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "corpus.hpp"
#include "semiwig/averaging.hpp"
#include "semiwig/evolution.hpp"
#include "semiwig/madelung.hpp"
#include "semiwig/purity.hpp"
#include "semiwig/semiclassics.hpp"
#include "semiwig/states.hpp"
#include "semiwig/wigner.hpp"

using namespace semiwig;
using semiwig::testing::mixed_corpus;
using semiwig::testing::pure_corpus;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- 1 -------------------------------------------------------------------------------------

Outcome wigner_exactness() {
  const double hbar = 0.5, q = 0.7, p = -0.4;
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto psi = coherent_state(g, q, p, hbar);
  const auto w = wigner_transform(QuantumState(psi));

  auto exact_psi = [&](double x) {
    return std::pow(kPi * hbar, -0.25) * std::exp(-(x - q) * (x - q) / (2 * hbar)) *
           std::polar(1.0, p * (x - q / 2) / hbar);
  };
  // Trapezoid in y of psi(x + hbar y/2) conj psi(x - hbar y/2) e^{-i y xi} / 2pi, on a 64^2 subgrid.
  const double Y = 30.0, h = 0.02;
  const int ny = static_cast<int>(2 * Y / h);
  double sup = 0.0;
  for (std::size_t i = 0; i < 128; i += 2) {
    const double x = g.node(i);
    for (std::size_t c = 0; c < 128; c += 2) {
      const double xi = w.grid.xigrid.frequency(c);
      std::complex<double> acc = 0.0;
      for (int j = 0; j <= ny; ++j) {
        const double y = -Y + j * h;
        acc += exact_psi(x + hbar * y / 2) * std::conj(exact_psi(x - hbar * y / 2)) * std::polar(1.0, -y * xi);
      }
      sup = std::max(sup, std::abs(acc.real() * h / (2 * kPi) - w.values(i, c)));
    }
  }

  const auto pure = l2_identity_check(QuantumState(psi));
  const auto mixed = l2_identity_check(mixed_state(
      {harmonic_eigenstate(g, 0, hbar), harmonic_eigenstate(g, 1, hbar), harmonic_eigenstate(g, 2, hbar)},
      {0.5, 0.3, 0.2}));
  const bool ok = sup <= 1e-6 && pure.relative_gap <= 1e-8 && mixed.relative_gap <= 1e-8;
  return {ok, fmt("sup|W-oracle| %.2e (<=1e-6)", sup) + fmt(" L2 gap pure %.2e", pure.relative_gap) +
                  fmt(" rank3 %.2e (<=1e-8)", mixed.relative_gap)};
}

// ---- 2 -------------------------------------------------------------------------------------

Outcome backend_equivalence() {
  const double hbar = 0.1;
  const auto g = SpatialGrid::centered(512, 16.0);
  const auto psi = coherent_state(g, 1.0, 0.0, hbar);
  const auto v = Potential::harmonic(1.0, 1.0);
  EvolutionConfig cfg;
  cfg.dt = 0.01;
  cfg.t_final = 1.0;
  cfg.record_stride = 10;
  cfg.backend = Backend::schrodinger;
  const auto waves = schrodinger_evolve(psi, v, cfg);
  const auto w0 = wigner_transform(QuantumState(psi));
  cfg.backend = Backend::wigner;
  const auto wt = wigner_evolve(w0, v, cfg);

  const double cell = g.spacing() * w0.grid.xigrid.spacing();
  const double mass0 = total_mass(w0), l20 = l2_norm_squared(w0);
  double worst = 0.0, mass = 0.0, l2 = 0.0, norm = 0.0;
  for (std::size_t f = 0; f < wt.size(); ++f) {
    const auto ref = wigner_transform(QuantumState(waves.frames[f]), w0.grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      const double d = wt.frames[f].values.data[i] - ref.values.data[i];
      acc += d * d;
    }
    worst = std::max(worst, std::sqrt(acc * cell));
    mass = std::max(mass, std::abs(total_mass(wt.frames[f]) - mass0));
    l2 = std::max(l2, std::abs(l2_norm_squared(wt.frames[f]) - l20) / l20);
    norm = std::max(norm, std::abs(l2_norm(g, waves.frames[f].samples()) - 1.0));
  }
  const bool ok = worst <= 1e-6 && mass <= 1e-10 && l2 <= 1e-10 && norm <= 1e-10;
  return {ok, fmt("max L2 |W_wigner - W[psi]| %.2e (<=1e-6)", worst) + fmt(" mass %.1e", mass) +
                  fmt(" trR2 %.1e", l2) + fmt(" norm %.1e (<=1e-10)", norm)};
}

// ---- 3 -------------------------------------------------------------------------------------

Outcome theta_moments() {
  const double hbar = 0.5;
  const auto g = SpatialGrid::centered(128, 16.0);
  const auto v = Potential::harmonic(1.0, 1.3, 0.2);
  double zeroth = 0.0, first = 0.0;
  for (const auto& s : {QuantumState(coherent_state(g, 0.8, -0.6, hbar)),
                        mixed_state({harmonic_eigenstate(g, 0, hbar), harmonic_eigenstate(g, 1, hbar)}, {0.6, 0.4})}) {
    const auto w = wigner_transform(s);
    const auto th = theta_apply(w, v);
    const auto rho = s.density();
    const double dxi = w.grid.xigrid.spacing();
    double scale = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) scale = std::max(scale, std::abs(rho[i] * v.gradient(g.node(i))));
    for (std::size_t i = 0; i < g.n(); ++i) {
      double m0 = 0.0, m1 = 0.0;
      for (std::size_t c = 0; c < w.grid.xigrid.n(); ++c) {
        m0 += th.values(i, c) * dxi;
        m1 += w.grid.xigrid.frequency(c) * th.values(i, c) * dxi;
      }
      zeroth = std::max(zeroth, std::abs(m0));
      first = std::max(first, std::abs(m1 + rho[i] * v.gradient(g.node(i))) / scale);
    }
  }
  return {zeroth <= 1e-12 && first <= 1e-10,
          fmt("max|int theta W| %.2e (<=1e-12)", zeroth) + fmt(" first moment rel err %.2e (<=1e-10)", first)};
}

// ---- 4 -------------------------------------------------------------------------------------

Outcome averaging_contrast() {
  const std::vector<double> hbars{0.2, 0.1, 0.05, 0.025};
  const auto g = SpatialGrid::centered(1024, 20.0);
  const auto v = Potential::soft_harmonic(1.0);
  EvolutionConfig cfg;
  cfg.dt = 0.01;
  cfg.t_final = 2.0;
  cfg.record_stride = 5;
  cfg.backend = Backend::von_neumann;
  const auto psi = Cutoff::gaussian(1.0);

  std::vector<FamilyMember> mixed, pure;
  for (double h : hbars) {
    const auto rank = static_cast<std::size_t>(std::ceil(1.0 / (2 * kPi * h)));
    std::vector<WaveFunction> waves;
    for (std::size_t n = 0; n < rank; ++n) waves.push_back(harmonic_eigenstate(g, n, h));
    const std::vector<double> weights(rank, 1.0 / static_cast<double>(rank));
    mixed.push_back(averaged_member(mixed_state(waves, weights), v, cfg, psi));
    pure.push_back(averaged_member(QuantumState(coherent_state(g, 0.5, 0.0, h)), v, cfg, psi));
  }
  BoundOptions opts;
  const auto mr = check_uniform_bound(mixed, 0.25, 0.0, opts);
  opts.mode = HypothesisMode::diagnose;
  const auto pr = check_uniform_bound(pure, 0.25, 0.0, opts);
  const bool ok = mr.bounded && mr.spread < 3.0 && mr.fit.slope >= -0.05 && pr.fit.slope <= -0.2;
  return {ok, fmt("mixed slope %.3f", mr.fit.slope) + fmt(" spread %.2f (slope>=-0.05, spread<3)", mr.spread) +
                  fmt("; pure slope %.3f (<=-0.2)", pr.fit.slope) + fmt(", pure needs C>=%.2f", pr.required_C)};
}

// ---- 5 -------------------------------------------------------------------------------------

Outcome theorem_machinery() {
  // gamma_k against quadrature of int_0^inf Y^{2k+1} G(Y) / (2k+1) dY, G the standard Gaussian density.
  boost::math::quadrature::exp_sinh<double> integrator;
  double gamma_err = 0.0;
  for (unsigned k = 0; k <= 4; ++k) {
    auto f = [k](double y) {
      if (y > 60.0) return 0.0;
      return std::pow(y, 2.0 * k + 1) * std::exp(-y * y / 2) / std::sqrt(2 * kPi) / (2.0 * k + 1);
    };
    const double q = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    gamma_err = std::max(gamma_err, std::abs(q - gamma_k(k)) / q);
  }

  // Randomized instances with xi d_y f = sum_k y^k b_k built exactly.
  std::mt19937_64 rng(20241018);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto yg = SpatialGrid::centered(256, 40.0);
  const FrequencyGrid xg(64, 0.25);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = static_cast<std::size_t>(inst % 3);
    struct Bump {
      cplx a;
      double c, w;
    };
    std::vector<Bump> fb;
    for (int j = 0; j < 3; ++j) fb.push_back({cplx(U(rng), U(rng)), 2.0 * U(rng), 0.8 + 0.5 * (U(rng) + 1.0)});
    Array2<cplx> f(xg.n(), yg.n());
    std::vector<Array2<cplx>> b(n + 1, Array2<cplx>(xg.n(), yg.n()));
    std::vector<std::vector<Bump>> extra(n + 1);
    for (std::size_t k = 1; k <= n; ++k)
      for (int j = 0; j < 2; ++j) extra[k].push_back({cplx(U(rng), U(rng)), U(rng), 0.7 + 0.3 * (U(rng) + 1.0)});
    for (std::size_t r = 0; r < xg.n(); ++r) {
      const double xi = xg.frequency(r);
      const double amp = std::exp(-0.05 * xi * xi);
      for (std::size_t c = 0; c < yg.n(); ++c) {
        const double y = yg.node(c);
        cplx fv = 0.0, dfv = 0.0;
        for (const auto& bb : fb) {
          const double e = std::exp(-(y - bb.c) * (y - bb.c) / (2 * bb.w * bb.w));
          fv += bb.a * e;
          dfv += bb.a * e * (-(y - bb.c) / (bb.w * bb.w));
        }
        f(r, c) = amp * fv;
        cplx rest = xi * amp * dfv;
        for (std::size_t k = 1; k <= n; ++k) {
          cplx bk = 0.0;
          for (const auto& bb : extra[k]) bk += bb.a * std::exp(-(y - bb.c) * (y - bb.c) / (2 * bb.w * bb.w));
          b[k](r, c) = amp * bk;
          rest -= std::pow(y, static_cast<double>(k)) * b[k](r, c);
        }
        b[0](r, c) = rest;
      }
    }
    worst = std::max(worst, mollifier_machinery(f, b, xg, yg).worst_ratio);
  }

  // Assembled inequality on n = 0 (free), 1 (harmonic eigenstate), 2 (quartic eigenstates).
  const double hbar = 0.5;
  const auto g = SpatialGrid::centered(128, 16.0);
  bool assembled = true;
  double worst_ratio = 0.0;
  {
    const auto k = kernel_from_state(QuantumState(coherent_state(g, 0.3, 0.8, hbar)));
    const auto r = density_sobolev_1d(k, {transport_source(k)});
    assembled = assembled && r.pass;
    worst_ratio = std::max(worst_ratio, r.ratio);
  }
  {
    const auto k = kernel_from_state(QuantumState(harmonic_eigenstate(g, 1, hbar)));
    const auto r = density_sobolev_1d(k, stationary_polynomial_sources(k, {0.0, 0.0, 0.5}, 1.0, 1));
    assembled = assembled && r.pass;
    worst_ratio = std::max(worst_ratio, r.ratio);
  }
  {
    Potential quartic;
    quartic.value = [](double x) { return 0.25 * x * x * x * x; };
    quartic.derivative = [](double x) { return x * x * x; };
    const auto eig = stationary_states(g, quartic, hbar, 1.0, 2);
    for (const auto& st : eig.states) {
      const auto k = kernel_from_state(QuantumState(st));
      const auto r = density_sobolev_1d(k, stationary_polynomial_sources(k, {0, 0, 0, 0, 0.25}, 1.0, 2));
      assembled = assembled && r.pass;
      worst_ratio = std::max(worst_ratio, r.ratio);
    }
  }
  const bool ok = gamma_err <= 1e-10 && worst <= 1.0 && assembled;
  return {ok, fmt("gamma_k rel err %.1e (<=1e-10)", gamma_err) + fmt(" mollifier worst ratio %.3f (<=1)", worst) +
                  fmt(" assembled worst ratio %.3f (<=1)", worst_ratio)};
}

// ---- 6 / 7 ---------------------------------------------------------------------------------

Outcome purity_characterization() {
  double pure_max = 0.0, mixed_min = std::numeric_limits<double>::infinity();
  int agree = 0, total = 0;
  for (const auto& ns : pure_corpus()) {
    const auto r = tatarskii_residuals(ns.state);
    pure_max = std::max(pure_max, r.max_residual);
    agree += (r.verdict == Verdict::pure) == (std::abs(r.spectral_purity - 1.0) <= 1e-6);
    ++total;
  }
  for (const auto& ns : mixed_corpus()) {
    const auto r = tatarskii_residuals(ns.state);
    mixed_min = std::min(mixed_min, r.max_residual);
    agree += (r.verdict == Verdict::mixed) == (std::abs(r.spectral_purity - 1.0) > 1e-6);
    ++total;
  }
  const bool ok = pure_max <= 1e-6 && mixed_min >= 10 * 1e-6 && agree == total;
  return {ok, fmt("pure max residual %.2e (<=1e-6)", pure_max) + fmt(" mixed min residual %.2e (>=1e-5)", mixed_min) +
                  " verdict agreement " + std::to_string(agree) + "/" + std::to_string(total)};
}

Outcome monokinetic_identity() {
  double worst = 0.0;
  for (const auto& ns : pure_corpus()) {
    const auto d = monokinetic_defect(moments_from_state(ns.state, 1.0), ns.state.hbar());
    worst = std::max(worst, d.relative_l1);
  }
  return {worst <= 1e-8, fmt("max relative L1 mismatch %.2e (<=1e-8)", worst)};
}

// ---- 8 / 9 ---------------------------------------------------------------------------------

struct Families {
  SweepReport coherent1, coherent2, scaled03, scaled05;
};

Families example_sweeps() {
  Families f;
  const auto g = SpatialGrid::centered(1024, 16.0);
  const std::vector<double> h1{0.2, 0.1, 0.05, 0.025};
  f.coherent1 = concentration_sweep([&](double h) { return coherent_state(g, 0.0, 0.5, h); }, h1);
  const auto g2 = SpatialGrid::centered(256, 12.0);
  const Box box({g2, g2});
  f.coherent2 = concentration_sweep([&](double h) { return coherent_state(box, {0.0, 0.0}, {0.3, 0.0}, h); },
                                    {0.4, 0.2, 0.1, 0.05});
  auto bump = [](double z) { return std::exp(-z * z / 2); };
  f.scaled03 = concentration_sweep([&](double h) { return scaled_state(g, bump, 0.5, 0.3, h); }, h1);
  f.scaled05 = concentration_sweep([&](double h) { return scaled_state(g, bump, 0.5, 0.5, h); }, h1);
  return f;
}

Outcome scaling_laws(const Families& f) {
  const double e1 = f.coherent1.fits[0].grad_rho_sq.slope;
  const double e2 = f.coherent2.fits[0].grad_rho_sq.slope;
  const double e3 = f.scaled03.fits[0].grad_rho_sq.slope;
  const double e5 = f.scaled05.fits[0].grad_rho_sq.slope;
  double pref = 0.0;
  for (const auto& r : f.coherent1.rows) pref += r.grad_rho_sq / std::sqrt(r.hbar);
  pref /= static_cast<double>(f.coherent1.rows.size());
  const double target = 1.0 / std::sqrt(4 * kPi);
  const double perr = std::abs(pref - target) / target;
  const bool exps = std::abs(e1 - 0.5) <= 0.05 && std::abs(e2) <= 0.05 && std::abs(e3 - 1.1) <= 0.05 &&
                    std::abs(e5 - 0.5) <= 0.05;
  return {exps && perr <= 0.01,
          fmt("exponents coherent d1 %.3f (0.5)", e1) + fmt(" d2 %.3f (0)", e2) + fmt(" scaled0.3 %.3f (1.1)", e3) +
              fmt(" scaled0.5 %.3f (0.5)", e5) + fmt("; d1 prefactor %.4f", pref) +
              fmt(" vs 1/sqrt(4pi)=%.4f", target) + fmt(" rel err %.3f (<=0.01)", perr) +
              fmt(" [1/sqrt(2pi)=%.4f]", 1.0 / std::sqrt(2 * kPi))};
}

Outcome pressure_equivalences(const Families& f) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const bool two_d = inst % 4 == 3;
    const auto g = SpatialGrid::centered(two_d ? 128 : 256, 2 * kPi);
    const Box box = two_d ? Box({g, g}) : Box(g);
    std::vector<double> a, ph;
    for (int k = 0; k < 8; ++k) {
      a.push_back(0.4 * U(rng));
      ph.push_back(kPi * U(rng));
    }
    std::vector<double> rho(box.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const auto x = box.point(i);
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[k] * std::cos((k + 1) * x[0] + ph[k]);
      if (two_d)
        for (int k = 4; k < 8; ++k) s += a[k] * std::cos((k - 3) * x[1] + (k - 4) * x[0] + ph[k]);
      rho[i] = std::exp(s);
    }
    worst = std::max(worst, pressure_identity_check(box, rho, 0.3 + 0.1 * (inst % 5), 1.0).max_residual());
  }
  int coincide = 0, families = 0;
  for (const auto* r : {&f.coherent1, &f.coherent2, &f.scaled03, &f.scaled05}) {
    coincide += r->fits[0].equivalence_holds;
    ++families;
  }
  return {worst <= 1e-8 && coincide == families,
          fmt("max identity residual %.2e (<=1e-8)", worst) + " verdicts coincide on " + std::to_string(coincide) +
              "/" + std::to_string(families) + " family sweeps"};
}

// ---- 10 ------------------------------------------------------------------------------------

Outcome madelung_closure() {
  const auto g = SpatialGrid::centered(256, 20.0);
  const auto psi = coherent_state(g, 1.0, 0.5, 1.0);
  const auto v = Potential::harmonic(1.0, 1.0);
  std::vector<double> cres, eres;
  const std::vector<double> dts{4e-3, 2e-3, 1e-3};
  for (double dt : dts) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.t_final = 0.2;
    cfg.backend = Backend::schrodinger;
    const auto cc = closure_crosscheck(schrodinger_evolve(psi, v, cfg), v);
    cres.push_back(cc.max_continuity);
    eres.push_back(cc.max_euler);
  }
  const double oc = std::log2(cres[1] / cres[2]), oe = std::log2(eres[1] / eres[2]);

  double worst = 0.0;
  const auto gm = SpatialGrid::centered(128, 6.0);
  for (int harm = 0; harm < 2; ++harm) {
    const auto start = periodic_coherent_state(gm, harm ? 0.3 : 0.0, 2 * kPi / 6.0, 1.0);
    const auto pot = harm ? Potential::harmonic(1.0, 1.0) : Potential::zero();
    MadelungConfig mc;
    mc.dt = 2.5e-4;
    mc.t_final = 0.1;
    mc.record_stride = 40;
    const auto fluid = madelung_evolve(fluid_from_wave(start), pot, mc);
    EvolutionConfig ec;
    ec.dt = 2.5e-4;
    ec.t_final = 0.1;
    ec.record_stride = 40;
    ec.backend = Backend::schrodinger;
    if (fluid.status != FluidStatus::completed) return {false, "madelung halted: " + fluid.message};
    for (const auto& row : compare_with_schrodinger(fluid.trajectory, schrodinger_evolve(start, pot, ec), pot))
      worst = std::max({worst, row.rho_error, row.u_error});
  }
  const bool ok = oc >= 1.8 && oc <= 2.2 && oe >= 1.8 && oe <= 2.2 && worst <= 1e-3;
  return {ok, fmt("continuity order %.2f", oc) + fmt(" euler order %.2f ([1.8,2.2])", oe) +
                  fmt("; madelung vs schrodinger rel L2 %.2e (<=1e-3)", worst)};
}

}  // namespace

int main() {
  set_warning_sink([](const std::string&) {});
  int failures = 0;
  auto run = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-28s %s  %s  [%.1fs]\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  run(1, "wigner-engine-exactness", wigner_exactness);
  run(2, "backend-equivalence", backend_equivalence);
  run(3, "theta-moment-identities", theta_moments);
  run(4, "averaging-contrast", averaging_contrast);
  run(5, "kernel-sobolev-machinery", theorem_machinery);
  run(6, "purity-characterization", purity_characterization);
  run(7, "monokinetic-identity", monokinetic_identity);
  Families fam;
  bool have_fam = true;
  try {
    fam = example_sweeps();
  } catch (const std::exception& e) {
    have_fam = false;
    std::printf("sweep construction failed: %s\n", e.what());
  }
  run(8, "example-scaling-laws", [&] { return have_fam ? scaling_laws(fam) : Outcome{false, "no sweeps"}; });
  run(9, "pressure-equivalences", [&] { return have_fam ? pressure_equivalences(fam) : Outcome{false, "no sweeps"}; });
  run(10, "madelung-closure", madelung_closure);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
