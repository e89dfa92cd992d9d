#include "semiwig/states.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "semiwig/error.hpp"
#include "semiwig/fft.hpp"

namespace semiwig {
namespace {

std::mutex g_sink_mutex;
std::function<void(const std::string&)> g_sink;

}  // namespace

void set_warning_sink(std::function<void(const std::string&)> sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void emit_warning(const std::string& message) {
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) g_sink(message);
  else std::cerr << "warning: " << message << '\n';
}

// ---- WaveFunction ---------------------------------------------------------------------------

cplx inner_product(const Box& box, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * box.cell_volume();
}

double l2_norm(const Box& box, const std::vector<cplx>& a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return std::sqrt(s * box.cell_volume());
}

WaveFunction::WaveFunction(Box box, double hbar, std::vector<cplx> samples)
    : box_(std::move(box)), hbar_(hbar), samples_(std::move(samples)) {
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw InvalidParameter("hbar must be positive");
  if (samples_.size() != box_.size()) throw InvalidState("sample count does not match the box");
  const double nrm = l2_norm(box_, samples_);
  if (!(std::abs(nrm - 1.0) <= 1e-10))
    throw InvalidState("wave function is not normalized (norm " + std::to_string(nrm) + ")");
}

const SpatialGrid& WaveFunction::grid() const {
  if (box_.dim() != 1) throw InvalidParameter("operation requires a one-dimensional wave function");
  return box_.axes.front();
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> r(samples_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(samples_[i]);
  return r;
}

WaveFunction normalize(Box box, double hbar, std::vector<cplx> samples) {
  const double nrm = l2_norm(box, samples);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidState("zero or non-finite wave function");
  for (auto& v : samples) v /= nrm;
  return WaveFunction(std::move(box), hbar, std::move(samples));
}

double boundary_amplitude(const WaveFunction& psi) {
  const Box& b = psi.box();
  const auto shape = b.shape();
  double worst = 0.0;
  for (std::size_t flat = 0; flat < b.size(); ++flat) {
    std::size_t rem = flat;
    bool edge = false;
    for (std::size_t a = shape.size(); a-- > 0;) {
      const std::size_t i = rem % shape[a];
      rem /= shape[a];
      if (i == 0 || i + 1 == shape[a]) edge = true;
    }
    if (edge) worst = std::max(worst, std::abs(psi.samples()[flat]));
  }
  return worst;
}

void check_boundary_decay(const WaveFunction& psi, const StateOptions& opts, const std::string& what) {
  if (opts.policy == BoundaryPolicy::ignore) return;
  const double edge = boundary_amplitude(psi);
  if (edge <= opts.decay_threshold) return;
  std::ostringstream msg;
  msg << what << ": |psi| = " << edge << " at the box boundary exceeds " << opts.decay_threshold
      << "; periodic wrap-around may corrupt diagnostics";
  if (opts.policy == BoundaryPolicy::error) throw BoundaryDecayError(msg.str());
  emit_warning(msg.str());
}

// ---- QuantumState ---------------------------------------------------------------------------

QuantumState::QuantumState(std::vector<double> weights, std::vector<WaveFunction> waves)
    : weights_(std::move(weights)), waves_(std::move(waves)) {
  if (waves_.empty()) throw InvalidState("a state needs at least one wave function");
  if (weights_.size() != waves_.size()) throw InvalidState("weights and waves differ in length");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidParameter("negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw InvalidState("weights do not sum to 1");
  for (const auto& w : waves_) {
    if (!(w.box() == waves_.front().box()) || w.hbar() != waves_.front().hbar())
      throw InvalidState("waves live on different grids or carry different hbar");
  }
  for (std::size_t i = 0; i < waves_.size(); ++i)
    for (std::size_t j = i + 1; j < waves_.size(); ++j)
      if (std::abs(inner_product(box(), waves_[i].samples(), waves_[j].samples())) > 1e-8)
        throw InvalidState("waves are not orthonormal");
}

QuantumState::QuantumState(WaveFunction pure) : QuantumState({1.0}, {std::move(pure)}) {}

std::vector<double> QuantumState::density() const {
  std::vector<double> r(box().size(), 0.0);
  for (std::size_t j = 0; j < waves_.size(); ++j) {
    const auto& s = waves_[j].samples();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += weights_[j] * std::norm(s[i]);
  }
  return r;
}

// ---- Potential ------------------------------------------------------------------------------

double Potential::gradient(double x) const {
  if (derivative) return derivative(x);
  const double h = 1e-3 * std::max(1.0, std::abs(x));
  return (-value(x + 2 * h) + 8 * value(x + h) - 8 * value(x - h) + value(x - 2 * h)) / (12 * h);
}

Potential Potential::zero() { return constant(0.0); }

Potential Potential::constant(double c) {
  Potential v;
  v.value = [c](double) { return c; };
  v.derivative = [](double) { return 0.0; };
  v.supnorm = std::abs(c);
  v.lipschitz = 0.0;
  v.description = "constant";
  return v;
}

Potential Potential::linear(double slope) {
  Potential v;
  v.value = [slope](double x) { return slope * x; };
  v.derivative = [slope](double) { return slope; };
  v.lipschitz = std::abs(slope);
  v.description = "linear";
  return v;
}

Potential Potential::harmonic(double m, double omega, double center) {
  Potential v;
  const double k = m * omega * omega;
  v.value = [k, center](double x) { return 0.5 * k * (x - center) * (x - center); };
  v.derivative = [k, center](double x) { return k * (x - center); };
  v.description = "harmonic";
  return v;
}

Potential Potential::soft_harmonic(double strength) {
  Potential v;
  v.value = [strength](double x) { return strength * (std::sqrt(1.0 + x * x) - 1.0); };
  v.derivative = [strength](double x) { return strength * x / std::sqrt(1.0 + x * x); };
  v.lipschitz = std::abs(strength);
  v.description = "soft_harmonic";
  return v;
}

Potential Potential::from_expression(const std::string& text, double hbar) {
  auto e = std::make_shared<Expression>(Expression::parse(text, {"x", "hbar"}));
  Potential v;
  v.value = [e, hbar](double x) {
    const double vals[2] = {x, hbar};
    return (*e)(std::span<const double>(vals, 2));
  };
  v.derivative = [e, hbar](double x) {
    const double vals[2] = {x, hbar};
    return e->value_and_derivative(std::span<const double>(vals, 2), 0).second;
  };
  v.description = text;
  return v;
}

void check_declared_bounds(const Potential& v, double a, double b, std::size_t samples) {
  double sup = 0.0, lip = 0.0;
  double prev = v(a);
  const double h = (b - a) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = a + h * static_cast<double>(i);
    const double val = v(x);
    sup = std::max(sup, std::abs(val));
    if (i > 0) lip = std::max(lip, std::abs(val - prev) / h);
    prev = val;
  }
  const double slack = 1e-9;
  if (v.supnorm && sup > *v.supnorm * (1 + slack) + slack)
    throw MetadataError("declared supnorm " + std::to_string(*v.supnorm) + " below sampled " + std::to_string(sup));
  if (v.lipschitz && lip > *v.lipschitz * (1 + slack) + slack)
    throw MetadataError("declared Lipschitz constant " + std::to_string(*v.lipschitz) + " below sampled " +
                        std::to_string(lip));
}

// ---- constructors ---------------------------------------------------------------------------

WaveFunction coherent_state(const Box& box, const std::vector<double>& q, const std::vector<double>& p,
                            double hbar, const StateOptions& opts) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  const std::size_t d = box.dim();
  if (q.size() != d || p.size() != d) throw InvalidParameter("q and p must match the box dimension");
  const double margin = 6.0 * std::sqrt(hbar);
  bool inside = true;
  for (std::size_t a = 0; a < d; ++a) {
    const auto& g = box.axes[a];
    if (q[a] - margin < g.origin() || q[a] + margin > g.origin() + g.length()) inside = false;
  }
  const double norm = std::pow(std::numbers::pi * hbar, -0.25 * static_cast<double>(d));
  std::vector<cplx> s(box.size());
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    const auto x = box.point(flat);
    double r2 = 0.0, phase = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      r2 += (x[a] - q[a]) * (x[a] - q[a]);
      phase += p[a] * (x[a] - 0.5 * q[a]);
    }
    s[flat] = norm * std::exp(-r2 / (2 * hbar)) * std::polar(1.0, phase / hbar);
  }
  auto psi = normalize(box, hbar, std::move(s));
  if (!inside && opts.policy != BoundaryPolicy::ignore) {
    const std::string msg = "coherent state centre lies within 6 sqrt(hbar) of the box edge";
    if (opts.policy == BoundaryPolicy::error) throw BoundaryDecayError(msg);
    emit_warning(msg);
  } else {
    check_boundary_decay(psi, opts, "coherent_state");
  }
  return psi;
}

WaveFunction coherent_state(const SpatialGrid& grid, double q, double p, double hbar, const StateOptions& opts) {
  return coherent_state(Box(grid), {q}, {p}, hbar, opts);
}

WaveFunction wkb_state(const SpatialGrid& grid, const std::function<double(double)>& a,
                       const std::function<double(double)>& S, double hbar, const StateOptions& opts) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  std::vector<cplx> s(grid.n());
  double amax = 0.0;
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    const double amp = a(x);
    if (amp < 0.0) throw InvalidParameter("WKB amplitude must be nonnegative");
    amax = std::max(amax, amp);
    s[j] = amp * std::polar(1.0, S(x) / hbar);
  }
  if (!(amax > 0.0)) throw InvalidState("WKB amplitude vanishes everywhere");
  auto psi = normalize(Box(grid), hbar, std::move(s));
  check_boundary_decay(psi, opts, "wkb_state");
  return psi;
}

WaveFunction scaled_state(const SpatialGrid& grid, const std::function<double(double)>& a, double p,
                          double alpha, double hbar, double width, const StateOptions& opts) {
  if (!(hbar > 0.0)) throw InvalidParameter("hbar must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in [0, 1)");
  const double scale = std::pow(hbar, alpha);
  if (width * scale < 8.0 * grid.spacing())
    throw ResolutionError("scaled profile spans fewer than 8 grid points (width " +
                          std::to_string(width * scale) + ", spacing " + std::to_string(grid.spacing()) + ")");
  std::vector<cplx> s(grid.n());
  const double amp = std::pow(hbar, -0.5 * alpha);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    s[j] = amp * a(x / scale) * std::polar(1.0, p * x / hbar);
  }
  auto psi = normalize(Box(grid), hbar, std::move(s));
  check_boundary_decay(psi, opts, "scaled_state");
  return psi;
}

WaveFunction harmonic_eigenstate(const SpatialGrid& grid, std::size_t n, double hbar, double m, double omega,
                                 double center, const StateOptions& opts) {
  if (!(hbar > 0.0) || !(m > 0.0) || !(omega > 0.0)) throw InvalidParameter("hbar, m, omega must be positive");
  const double a = std::sqrt(m * omega / hbar);
  std::vector<cplx> s(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double xi = a * (grid.node(j) - center);
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = static_cast<double>(k);
      const double next = std::sqrt(2.0 / (kk + 1)) * xi * cur - std::sqrt(kk / (kk + 1)) * prev;
      prev = cur;
      cur = next;
    }
    s[j] = std::sqrt(a) * cur;
  }
  auto psi = normalize(Box(grid), hbar, std::move(s));
  check_boundary_decay(psi, opts, "harmonic_eigenstate");
  return psi;
}

Eigenpairs stationary_states(const SpatialGrid& grid, const Potential& v, double hbar, double m,
                             std::size_t count) {
  const std::size_t n = grid.n();
  if (count == 0 || count > n) throw InvalidParameter("eigenpair count out of range");
  Eigen::MatrixXd H(n, n);
  std::vector<cplx> col(n);
  for (std::size_t l = 0; l < n; ++l) {
    std::fill(col.begin(), col.end(), cplx(0.0));
    col[l] = 1.0;
    auto d2 = fft::derivative(grid, std::span<const cplx>(col), 2);
    for (std::size_t j = 0; j < n; ++j) H(j, l) = -hbar * hbar / (2 * m) * d2[j].real();
  }
  H = 0.5 * (H + H.transpose()).eval();
  for (std::size_t j = 0; j < n; ++j) H(j, j) += v(grid.node(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw Error("eigen-decomposition failed");
  Eigenpairs out;
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::VectorXd vec = es.eigenvectors().col(static_cast<Eigen::Index>(k));
    Eigen::Index imax = 0;
    vec.cwiseAbs().maxCoeff(&imax);
    if (vec(imax) < 0) vec = -vec;
    std::vector<cplx> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = vec(static_cast<Eigen::Index>(j));
    out.energies.push_back(es.eigenvalues()(static_cast<Eigen::Index>(k)));
    out.states.push_back(normalize(Box(grid), hbar, std::move(s)));
  }
  return out;
}

std::vector<WaveFunction> gram_schmidt(const std::vector<WaveFunction>& waves, double tol) {
  std::vector<std::vector<cplx>> basis;
  std::vector<WaveFunction> out;
  for (const auto& w : waves) {
    std::vector<cplx> v = w.samples();
    const double original = l2_norm(w.box(), v);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const cplx c = inner_product(w.box(), b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    }
    const double nrm = l2_norm(w.box(), v);
    if (nrm <= tol * original) throw InvalidState("waves are linearly dependent");
    for (auto& x : v) x /= nrm;
    basis.push_back(v);
    out.emplace_back(w.box(), w.hbar(), std::move(v));
  }
  return out;
}

QuantumState mixed_state(const std::vector<WaveFunction>& waves, const std::vector<double>& weights) {
  for (double w : weights)
    if (!(w >= 0.0)) throw InvalidParameter("negative weight");
  return QuantumState(weights, gram_schmidt(waves));
}

double hilbert_schmidt_trace(const QuantumState& s) {
  double t = 0.0;
  for (double w : s.weights()) t += w * w;
  return t;
}

std::size_t rank_lower_bound(double C, double hbar, std::size_t d) {
  if (!(C > 0.0) || !(hbar > 0.0)) throw InvalidParameter("C and hbar must be positive");
  const double v = 1.0 / (std::pow(2 * std::numbers::pi * hbar, static_cast<double>(d)) * C);
  return static_cast<std::size_t>(std::ceil(v - 1e-12));
}

QuantumState admissible_mixture(const SpatialGrid& grid, double hbar, double m, double omega, double C) {
  const std::size_t N = rank_lower_bound(C, hbar, 1);
  std::vector<WaveFunction> waves;
  for (std::size_t k = 0; k < N; ++k) waves.push_back(harmonic_eigenstate(grid, k, hbar, m, omega));
  std::vector<double> w(N, 1.0 / static_cast<double>(N));
  return mixed_state(waves, w);
}

}  // namespace semiwig
