#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "semiwig/averaging.hpp"
#include "semiwig/error.hpp"
#include "semiwig/evolution.hpp"
#include "semiwig/expression.hpp"
#include "semiwig/field_io.hpp"
#include "semiwig/madelung.hpp"
#include "semiwig/parallel.hpp"
#include "semiwig/purity.hpp"
#include "semiwig/semiclassics.hpp"
#include "semiwig/states.hpp"
#include "semiwig/wigner.hpp"

namespace semiwig::cli {

using nlohmann::json;
namespace fs = std::filesystem;

bool RunResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  std::ofstream out_;
};

double threshold(const ExperimentConfig& c, const std::string& key, double fallback) {
  const auto it = c.thresholds.find(key);
  return it == c.thresholds.end() ? fallback : it->second;
}

Check at_most(std::string name, double v, double t) { return {std::move(name), v, t, "<=", v <= t}; }
Check at_least(std::string name, double v, double t) { return {std::move(name), v, t, ">=", v >= t}; }

std::function<double(double)> unary(const std::string& text, double hbar) {
  auto e = std::make_shared<Expression>(Expression::parse(text, {"x", "hbar"}));
  return [e, hbar](double x) {
    const double v[2] = {x, hbar};
    return (*e)(std::span<const double>(v, 2));
  };
}

Potential make_potential(const PotentialSpec& p, double hbar, double m) {
  if (p.kind == "harmonic") return Potential::harmonic(m, p.omega, p.center);
  if (p.kind == "soft_harmonic") return Potential::soft_harmonic(p.strength);
  if (p.kind == "expression") return Potential::from_expression(p.expression, hbar);
  return Potential::zero();
}

struct Geometry {
  SpatialGrid grid;
  Box box;
};

Geometry geometry(const ExperimentConfig& c) {
  const auto g = SpatialGrid::centered(c.n, c.length);
  return {g, Box(std::vector<SpatialGrid>(c.dim, g))};
}

std::vector<WaveFunction> pure_waves(const StateSpec& s, const Geometry& geo, double h, double m);

QuantumState make_state(const StateSpec& s, const Geometry& geo, double h, double m) {
  if (s.family == "hermite_mixture") {
    const std::size_t rank = s.rank ? *s.rank : static_cast<std::size_t>(std::ceil(1.0 / (2 * kPi * h)));
    std::vector<WaveFunction> waves;
    for (std::size_t n = 0; n < rank; ++n) waves.push_back(harmonic_eigenstate(geo.grid, n, h, m, s.omega));
    return QuantumState(std::vector<double>(rank, 1.0 / static_cast<double>(rank)), std::move(waves));
  }
  if (s.family == "mixture") {
    std::vector<WaveFunction> waves;
    for (const auto& c : s.components) {
      auto w = pure_waves(c, geo, h, m);
      if (w.size() != 1) throw InvalidParameter("mixture components must be pure states");
      waves.push_back(std::move(w.front()));
    }
    double total = 0.0;
    for (double w : s.weights) total += w;
    std::vector<double> weights;
    for (double w : s.weights) weights.push_back(w / total);
    return mixed_state(waves, weights);
  }
  return QuantumState(pure_waves(s, geo, h, m).front());
}

std::vector<WaveFunction> pure_waves(const StateSpec& s, const Geometry& geo, double h, double m) {
  const auto& g = geo.grid;
  if (s.family == "coherent")
    return {geo.box.dim() == 1 ? coherent_state(g, s.q[0], s.p[0], h) : coherent_state(geo.box, s.q, s.p, h)};
  if (s.family == "periodic_coherent") return {periodic_coherent_state(g, s.q[0], s.p[0], h)};
  if (s.family == "wkb") return {wkb_state(g, unary(s.amplitude, h), unary(s.phase, h), h)};
  if (s.family == "scaled") return {scaled_state(g, unary(s.profile, h), s.p[0], s.alpha, h, s.width)};
  if (s.family == "hermite") return {harmonic_eigenstate(g, s.n, h, m, s.omega)};
  if (s.family == "stationary") {
    auto eig = stationary_states(g, Potential::from_expression(s.potential, h), h, m, s.n + 1);
    return {eig.states.at(s.n)};
  }
  throw InvalidParameter("state family \"" + s.family + "\" is not a pure state");
}

EvolutionConfig evolution_config(const ExperimentConfig& c) {
  EvolutionConfig e;
  e.dt = c.evolution.dt;
  e.t_final = c.evolution.t_final;
  e.mass = c.mass;
  e.record_stride = c.evolution.record_stride;
  if (c.evolution.backend == "schrodinger")
    e.backend = Backend::schrodinger;
  else if (c.evolution.backend == "wigner")
    e.backend = Backend::wigner;
  else
    e.backend = Backend::von_neumann;
  return e;
}

std::string tag(std::size_t i) { return "h" + std::to_string(i); }

// ---- kinds ------------------------------------------------------------------------------------

void run_transform(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  Csv csv(out / "transform.csv", "label,hbar,mass,l2_lhs,l2_rhs,l2_gap,hermitian_defect");
  r.outputs.push_back("transform.csv");
  double worst = 0.0, mass_err = 0.0;
  for (std::size_t i = 0; i < c.hbars.size(); ++i) {
    const double h = c.hbars[i];
    for (const auto& spec : c.states) {
      const auto s = make_state(spec, geo, h, c.mass);
      const auto k = kernel_from_state(s);
      const auto w = wigner_from_kernel(k);
      const auto l2 = l2_identity_check(s);
      const double mass = total_mass(w);
      csv.row(spec.label, h, mass, l2.lhs, l2.rhs, l2.relative_gap, hermitian_defect(k));
      worst = std::max(worst, l2.relative_gap);
      mass_err = std::max(mass_err, std::abs(mass - 1.0));
      if (c.dump_fields) {
        const std::string base = "wigner_" + spec.label + "_" + tag(i);
        io::write_field(out / base, w);
        r.outputs.push_back(base + ".f64");
        r.outputs.push_back(base + ".json");
      }
    }
  }
  r.checks.push_back(at_most("l2_identity", worst, threshold(c, "l2_identity", 1e-8)));
  r.checks.push_back(at_most("unit_mass", mass_err, threshold(c, "unit_mass", 1e-10)));
}

void run_evolve(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  const auto cfg = evolution_config(c);
  Csv csv(out / "evolve.csv", "label,hbar,t,mass,l2_norm_sq,mass_drift,l2_drift,backend_gap");
  r.outputs.push_back("evolve.csv");
  double drift = 0.0, gap = 0.0;
  bool compared = false;
  for (std::size_t i = 0; i < c.hbars.size(); ++i) {
    const double h = c.hbars[i];
    const auto v = make_potential(c.potential, h, c.mass);
    for (const auto& spec : c.states) {
      const auto s = make_state(spec, geo, h, c.mass);
      const auto traj = evolve_wigner_frames(s, v, cfg);
      std::optional<Trajectory<WignerField>> ref;
      if (cfg.backend == Backend::wigner && s.rank() == 1) {
        auto rc = cfg;
        rc.backend = Backend::schrodinger;
        ref = evolve_wigner_frames(s, v, rc, traj.frames.front().grid);
        compared = true;
      }
      const double m0 = total_mass(traj.frames.front()), l0 = l2_norm_squared(traj.frames.front());
      for (std::size_t f = 0; f < traj.size(); ++f) {
        const auto& w = traj.frames[f];
        const double mass = total_mass(w), l2 = l2_norm_squared(w);
        double g = std::nan("");
        if (ref) {
          double acc = 0.0;
          for (std::size_t k = 0; k < w.values.size(); ++k) {
            const double d = w.values.data[k] - ref->frames[f].values.data[k];
            acc += d * d;
          }
          g = std::sqrt(acc * w.grid.xgrid.spacing() * w.grid.xigrid.spacing());
          gap = std::max(gap, g);
        }
        const double dm = std::abs(mass - m0), dl = std::abs(l2 - l0) / l0;
        drift = std::max({drift, dm, dl});
        csv.row(spec.label, h, traj.times[f], mass, l2, dm, dl, g);
      }
      if (c.dump_fields) {
        const std::string stem = "frames_" + spec.label + "_" + tag(i);
        for (std::size_t f = 0; f < traj.size(); ++f) io::write_field(out / (stem + "_" + std::to_string(f)), traj.frames[f]);
        io::write_trajectory_index(out, stem, traj.times);
        r.outputs.push_back(stem + "_index.csv");
      }
    }
  }
  r.checks.push_back(at_most("conservation", drift, threshold(c, "conservation", 1e-10)));
  if (compared) r.checks.push_back(at_most("backend_gap", gap, threshold(c, "backend_gap", 1e-6)));
}

void run_sweep(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  if (c.states.size() != 1) throw InvalidParameter("a sweep takes exactly one state family");
  const auto spec = c.states.front();
  SweepOptions so;
  so.mass = c.mass;
  so.dt = c.evolution.dt;
  so.potential = make_potential(c.potential, c.hbars.front(), c.mass);
  const auto rep = concentration_sweep(
      [&](double h) {
        auto w = pure_waves(spec, geo, h, c.mass);
        return w.front();
      },
      c.hbars, c.times, so);
  {
    std::ofstream f(out / "sweep.csv", std::ios::binary);
    f << sweep_csv(rep);
  }
  r.outputs.push_back("sweep.csv");
  const double tol = threshold(c, "exponent_tolerance", 0.05);
  for (const auto& fit : rep.fits) {
    const std::string suffix = rep.fits.size() > 1 ? "@t=" + num(fit.t) : "";
    r.notes.push_back("grad_rho_sq exponent" + suffix + " = " + num(fit.grad_rho_sq.slope));
    if (const auto it = c.expect.find("grad_rho_sq_exponent"); it != c.expect.end())
      r.checks.push_back(at_most("grad_rho_sq_exponent" + suffix, std::abs(fit.grad_rho_sq.slope - it->second), tol));
    r.checks.push_back({"equivalence" + suffix, fit.equivalence_holds ? 1.0 : 0.0, 1.0, "==", fit.equivalence_holds});
  }
  if (const auto it = c.expect.find("prefactor"); it != c.expect.end()) {
    const double slope = c.expect.count("grad_rho_sq_exponent") ? c.expect.at("grad_rho_sq_exponent") : 0.0;
    double pref = 0.0;
    std::size_t count = 0;
    for (const auto& row : rep.rows)
      if (row.t == rep.times.front()) {
        pref += row.grad_rho_sq / std::pow(row.hbar, slope);
        ++count;
      }
    pref /= static_cast<double>(count);
    r.checks.push_back(at_most("prefactor", std::abs(pref - it->second) / it->second,
                               threshold(c, "prefactor_tolerance", 0.01)));
    r.notes.push_back("measured prefactor = " + num(pref));
  }
}

void run_purity(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  struct Item {
    std::string label;
    std::string expect;
    QuantumState state;
    double hbar;
  };
  std::vector<Item> items;
  for (double h : c.hbars) {
    for (const auto& spec : c.states) items.push_back({spec.label, spec.expect, make_state(spec, geo, h, c.mass), h});
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> pos(-2.0, 2.0), wt(0.2, 0.5);
    for (std::size_t k = 0; k < c.random_mixtures; ++k) {
      const double q1 = pos(rng), p1 = pos(rng), q2 = pos(rng), p2 = pos(rng), w = wt(rng);
      items.push_back({"random_mixture_" + std::to_string(k), "mixed",
                       mixed_state({coherent_state(geo.grid, q1, p1, h), coherent_state(geo.grid, q2, p2, h)},
                                   {1.0 - w, w}),
                       h});
    }
  }
  PurityOptions po;
  po.tau = threshold(c, "mask_tau", po.tau);
  po.pure_tolerance = threshold(c, "pure_residual", po.pure_tolerance);
  std::vector<std::optional<PurityReport>> reports(items.size());
  parallel_for(items.size(), [&](std::size_t i) { reports[i] = tatarskii_residuals(items[i].state, po); });

  Csv csv(out / "purity.csv", "label,hbar,rank,max_residual,masked_fraction,spectral_purity,verdict,expected");
  r.outputs.push_back("purity.csv");
  double pure_max = 0.0, mixed_min = std::numeric_limits<double>::infinity();
  std::size_t agree = 0, expected_ok = 0, expected_n = 0, n_pure = 0, n_mixed = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& rep = *reports[i];
    const bool spectral_pure = std::abs(rep.spectral_purity - 1.0) <= po.pure_tolerance;
    agree += spectral_pure ? rep.verdict == Verdict::pure : rep.verdict == Verdict::mixed;
    if (spectral_pure) {
      pure_max = std::max(pure_max, rep.max_residual);
      ++n_pure;
    } else {
      mixed_min = std::min(mixed_min, rep.max_residual);
      ++n_mixed;
    }
    if (!items[i].expect.empty()) {
      ++expected_n;
      expected_ok += items[i].expect == to_string(rep.verdict);
    }
    csv.row(items[i].label, items[i].hbar, items[i].state.rank(), rep.max_residual, rep.masked_fraction,
            rep.spectral_purity, std::string(to_string(rep.verdict)), items[i].expect);
  }
  const double n = static_cast<double>(items.size());
  r.checks.push_back({"verdict_agreement", static_cast<double>(agree), n, "==", agree == items.size()});
  if (expected_n)
    r.checks.push_back({"expected_verdicts", static_cast<double>(expected_ok), static_cast<double>(expected_n), "==",
                        expected_ok == expected_n});
  if (n_pure) r.checks.push_back(at_most("pure_residual", pure_max, po.pure_tolerance));
  if (n_mixed) r.checks.push_back(at_least("mixed_residual", mixed_min, threshold(c, "mixed_residual", 1e-5)));
}

void run_averaging(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  const auto cfg = evolution_config(c);
  const auto psi = Cutoff::from_expression(c.cutoff);
  Csv rows(out / "averaging.csv", "label,hbar,purity,required_C,norm,weighted");
  Csv table(out / "contrast.csv", "label,mode,slope,spread,required_C,bounded,grows");
  r.outputs.push_back("averaging.csv");
  r.outputs.push_back("contrast.csv");
  for (const auto& spec : c.states) {
    std::vector<std::optional<FamilyMember>> legs(c.hbars.size());
    parallel_for(legs.size(), [&](std::size_t i) {
      const double h = c.hbars[i];
      legs[i] = averaged_member(make_state(spec, geo, h, c.mass), make_potential(c.potential, h, c.mass), cfg, psi);
    });
    std::vector<FamilyMember> family;
    for (auto& l : legs) family.push_back(std::move(*l));
    BoundOptions bo;
    bo.mode = spec.mode == "diagnose" ? HypothesisMode::diagnose : HypothesisMode::enforce;
    bo.C = threshold(c, "hs_constant", bo.C);
    bo.bounded_slope = threshold(c, "bounded_slope", bo.bounded_slope);
    bo.bounded_spread = threshold(c, "bounded_spread", bo.bounded_spread);
    bo.growth_slope = threshold(c, "growth_slope", bo.growth_slope);
    const auto rep = check_uniform_bound(family, c.sobolev_s, c.beta, bo);
    for (const auto& row : rep.rows) {
      const auto it = std::find_if(family.begin(), family.end(), [&](const FamilyMember& f) { return f.hbar == row.hbar; });
      rows.row(spec.label, row.hbar, it->purity, row.required_C, row.norm, row.weighted);
    }
    table.row(spec.label, spec.mode, rep.fit.slope, rep.spread, rep.required_C, rep.bounded, rep.grows);
    if (spec.expect == "bounded") {
      r.checks.push_back(at_least(spec.label + ".slope", rep.fit.slope, bo.bounded_slope));
      r.checks.push_back({spec.label + ".spread", rep.spread, bo.bounded_spread, "<", rep.spread < bo.bounded_spread});
    } else if (spec.expect == "grows") {
      r.checks.push_back(at_most(spec.label + ".slope", rep.fit.slope, bo.growth_slope));
    }
  }
}

void run_madelung(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  double worst = 0.0;
  bool halted = false;
  Csv csv(out / "madelung.csv", "label,hbar,t,L2_rho_err,L2_u_err,continuity_res,euler_res");
  Csv status(out / "madelung_status.csv", "label,hbar,status,halt_time,mass_drift,closure_continuity,closure_euler");
  r.outputs.push_back("madelung.csv");
  r.outputs.push_back("madelung_status.csv");
  for (double h : c.hbars) {
    const auto v = make_potential(c.potential, h, c.mass);
    for (const auto& spec : c.states) {
      const auto s = make_state(spec, geo, h, c.mass);
      if (s.rank() != 1) throw InvalidParameter("Madelung evolution needs a pure state");
      const auto& psi = s.waves().front();
      MadelungConfig mc;
      mc.dt = c.evolution.dt;
      mc.t_final = c.evolution.t_final;
      mc.record_stride = c.evolution.record_stride;
      const auto fluid = madelung_evolve(fluid_from_wave(psi, c.mass), v, mc);
      auto ec = evolution_config(c);
      ec.backend = Backend::schrodinger;
      const auto waves = schrodinger_evolve(psi, v, ec);
      const auto cc = closure_crosscheck(waves, v, c.mass);
      status.row(spec.label, h, std::string(to_string(fluid.status)), fluid.halt_time, fluid.mass_drift,
                 cc.max_continuity, cc.max_euler);
      if (fluid.status != FluidStatus::completed) {
        halted = true;
        r.notes.push_back(spec.label + ": " + fluid.message);
        continue;
      }
      for (const auto& row : compare_with_schrodinger(fluid.trajectory, waves, v, c.mass)) {
        csv.row(spec.label, h, row.t, row.rho_error, row.u_error, row.continuity, row.euler);
        worst = std::max({worst, row.rho_error, row.u_error});
      }
    }
  }
  r.checks.push_back({"no_vacuum", halted ? 0.0 : 1.0, 1.0, "==", !halted});
  r.checks.push_back(at_most("madelung_error", worst, threshold(c, "madelung_error", 1e-3)));
}

void run_density1d(const ExperimentConfig& c, const fs::path& out, RunResult& r) {
  const auto geo = geometry(c);
  Csv csv(out / "density1d.csv",
          "label,hbar,n,s,lhs,rhs,ratio,literal_rhs,empirical_constant,decomposition_residual");
  r.outputs.push_back("density1d.csv");
  double worst = 0.0;
  const double tol = threshold(c, "decomposition_residual", 1e-6);
  for (double h : c.hbars) {
    for (const auto& spec : c.states) {
      const auto k = kernel_from_state(make_state(spec, geo, h, c.mass));
      const auto u = c.order == 0 ? std::vector<Array2<cplx>>{transport_source(k)}
                                  : stationary_polynomial_sources(k, c.coefficients, c.mass, c.order);
      const auto rep = density_sobolev_1d(k, u, tol);
      csv.row(spec.label, h, rep.n, rep.s, rep.lhs, rep.rhs, rep.ratio, rep.literal_rhs, rep.empirical_constant,
              rep.residual);
      worst = std::max(worst, rep.ratio);
    }
  }
  r.checks.push_back(at_most("sobolev_ratio", worst, threshold(c, "sobolev_ratio", 1.0)));
}

void write_manifest(const ExperimentConfig& c, const RunOptions& o, const RunResult& r) {
  json m;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(c.text)));
  m["name"] = c.name;
  m["kind"] = to_string(c.kind);
  m["config_file"] = c.source.filename().string();
  m["config_hash"] = std::string("fnv1a64:") + hash;
  m["version"] = SEMIWIG_VERSION;
  m["seed"] = o.seed;
  m["threads"] = o.threads;
  json checks = json::array();
  for (const auto& ch : r.checks)
    checks.push_back({{"name", ch.name}, {"value", ch.value}, {"threshold", ch.threshold},
                      {"relation", ch.relation}, {"result", ch.pass ? "PASS" : "FAIL"}});
  m["checks"] = checks;
  m["thresholds"] = json::object();
  for (const auto& ch : r.checks) m["thresholds"][ch.name] = ch.relation + " " + num(ch.threshold);
  m["notes"] = r.notes;
  m["outputs"] = r.outputs;
  m["status"] = r.ok() ? "PASS" : "FAIL";
  std::ofstream f(o.out / "manifest.json", std::ios::binary);
  f << m.dump(2) << '\n';
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const RunOptions& o) {
  fs::create_directories(o.out);
  set_default_threads(o.threads);
  ExperimentConfig cfg = c;
  cfg.seed = o.seed;
  RunResult r;
  switch (cfg.kind) {
    case Kind::transform: run_transform(cfg, o.out, r); break;
    case Kind::evolve: run_evolve(cfg, o.out, r); break;
    case Kind::sweep: run_sweep(cfg, o.out, r); break;
    case Kind::purity: run_purity(cfg, o.out, r); break;
    case Kind::averaging: run_averaging(cfg, o.out, r); break;
    case Kind::madelung: run_madelung(cfg, o.out, r); break;
    case Kind::density1d: run_density1d(cfg, o.out, r); break;
  }
  write_manifest(cfg, o, r);
  return r;
}

}  // namespace semiwig::cli
