#include "semiwig/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "semiwig/error.hpp"

namespace semiwig::fft {
namespace {

using PlanKey = std::tuple<std::vector<std::size_t>, std::size_t, std::size_t, int>;

struct PlanCache {
  std::mutex mutex;
  std::map<PlanKey, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

// Plan for a DFT of length shape[axis] batched over the inner block of one outer slab.
// axis == shape.size() means the full multidimensional transform.
fftw_plan get_plan(const std::vector<std::size_t>& shape, std::size_t axis, int sign) {
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  PlanKey key{shape, axis, total, sign};
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  auto* buf = fftw_alloc_complex(total);
  fftw_plan plan = nullptr;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (axis == shape.size()) {
    std::vector<int> n(shape.begin(), shape.end());
    plan = fftw_plan_many_dft(static_cast<int>(n.size()), n.data(), 1, buf, nullptr, 1, 0, buf,
                              nullptr, 1, 0, sign, flags);
  } else {
    std::size_t inner = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
    int n = static_cast<int>(shape[axis]);
    int stride = static_cast<int>(inner);
    plan = fftw_plan_many_dft(1, &n, static_cast<int>(inner), buf, nullptr, stride, 1, buf,
                              nullptr, stride, 1, sign, flags);
  }
  fftw_free(buf);
  if (!plan) throw Error("FFTW planning failed");
  c.plans.emplace(std::move(key), plan);
  return plan;
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void execute_axis(cplx* data, const std::vector<std::size_t>& shape, std::size_t axis,
                  Direction dir) {
  if (axis >= shape.size()) throw InvalidParameter("axis out of range");
  const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = get_plan(shape, axis, sign);
  std::size_t outer = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
  std::size_t slab = 1;
  for (std::size_t a = axis; a < shape.size(); ++a) slab *= shape[a];
  for (std::size_t o = 0; o < outer; ++o) {
    auto* p = as_fftw(data + o * slab);
    fftw_execute_dft(plan, p, p);
  }
}

void execute_all(cplx* data, const std::vector<std::size_t>& shape, Direction dir) {
  const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = get_plan(shape, shape.size(), sign);
  fftw_execute_dft(plan, as_fftw(data), as_fftw(data));
}

double fft_wavenumber(std::size_t j, const SpatialGrid& g) noexcept {
  const auto n = static_cast<long>(g.n());
  long k = static_cast<long>(j);
  if (k >= n / 2) k -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(k) / g.length();
}

namespace {

// Pre/post factors turning the raw DFT into the continuous-transform approximation.
struct TransformFactors {
  std::vector<double> sign;   // (-1)^j
  std::vector<cplx> phase;    // e^{-i k_m x0}
};

TransformFactors factors(const SpatialGrid& g) {
  const FrequencyGrid k = dual_grid(g);
  TransformFactors t;
  t.sign.resize(g.n());
  t.phase.resize(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    t.sign[j] = (j % 2 == 0) ? 1.0 : -1.0;
    t.phase[j] = std::polar(1.0, -k.frequency(j) * g.origin());
  }
  return t;
}

void apply_forward_1d(cplx* base, std::size_t n, std::size_t stride, const TransformFactors& t,
                      double dx, bool pre) {
  if (pre) {
    for (std::size_t j = 0; j < n; ++j) base[j * stride] *= t.sign[j];
  } else {
    for (std::size_t m = 0; m < n; ++m) base[m * stride] *= dx * t.phase[m];
  }
}

void apply_inverse_1d(cplx* base, std::size_t n, std::size_t stride, const TransformFactors& t,
                      double scale, bool pre) {
  if (pre) {
    for (std::size_t m = 0; m < n; ++m) base[m * stride] *= std::conj(t.phase[m]);
  } else {
    for (std::size_t j = 0; j < n; ++j) base[j * stride] *= scale * t.sign[j];
  }
}

}  // namespace

std::vector<cplx> forward(const SpatialGrid& g, std::span<const cplx> f) {
  if (f.size() != g.n()) throw InvalidParameter("sample count does not match grid");
  std::vector<cplx> out(f.begin(), f.end());
  Array2<cplx> a;
  a.rows = g.n();
  a.cols = 1;
  a.data = std::move(out);
  forward_axis(a, g, 0);
  return std::move(a.data);
}

std::vector<cplx> inverse(const SpatialGrid& g, std::span<const cplx> F) {
  if (F.size() != g.n()) throw InvalidParameter("sample count does not match grid");
  Array2<cplx> a;
  a.rows = g.n();
  a.cols = 1;
  a.data.assign(F.begin(), F.end());
  inverse_axis(a, g, 0);
  return std::move(a.data);
}

void forward_axis(Array2<cplx>& a, const SpatialGrid& g, std::size_t axis) {
  const std::size_t n = axis == 0 ? a.rows : a.cols;
  if (n != g.n()) throw InvalidParameter("axis length does not match grid");
  const auto t = factors(g);
  const std::size_t stride = axis == 0 ? a.cols : 1;
  const std::size_t lines = axis == 0 ? a.cols : a.rows;
  const std::size_t step = axis == 0 ? 1 : a.cols;
  for (std::size_t l = 0; l < lines; ++l) apply_forward_1d(a.data.data() + l * step, n, stride, t, g.spacing(), true);
  execute_axis(a.data.data(), {a.rows, a.cols}, axis, Direction::forward);
  for (std::size_t l = 0; l < lines; ++l) apply_forward_1d(a.data.data() + l * step, n, stride, t, g.spacing(), false);
}

void inverse_axis(Array2<cplx>& a, const SpatialGrid& g, std::size_t axis) {
  const std::size_t n = axis == 0 ? a.rows : a.cols;
  if (n != g.n()) throw InvalidParameter("axis length does not match grid");
  const auto t = factors(g);
  const std::size_t stride = axis == 0 ? a.cols : 1;
  const std::size_t lines = axis == 0 ? a.cols : a.rows;
  const std::size_t step = axis == 0 ? 1 : a.cols;
  const double scale = 1.0 / (static_cast<double>(n) * g.spacing());
  for (std::size_t l = 0; l < lines; ++l) apply_inverse_1d(a.data.data() + l * step, n, stride, t, scale, true);
  execute_axis(a.data.data(), {a.rows, a.cols}, axis, Direction::backward);
  for (std::size_t l = 0; l < lines; ++l) apply_inverse_1d(a.data.data() + l * step, n, stride, t, scale, false);
}

namespace {

std::vector<cplx> derivative_multipliers(const SpatialGrid& g, int order) {
  if (order < 0) throw InvalidParameter("derivative order must be nonnegative");
  std::vector<cplx> mult(g.n());
  const double inv_n = 1.0 / static_cast<double>(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double k = fft_wavenumber(j, g);
    cplx m = std::pow(cplx(0.0, k), order);
    if (order % 2 == 1 && j == g.n() / 2) m = 0.0;
    mult[j] = m * inv_n;
  }
  return mult;
}

void derivative_nd(cplx* data, const std::vector<std::size_t>& shape, std::size_t axis,
                   const SpatialGrid& g, int order) {
  if (order == 0) return;
  const auto mult = derivative_multipliers(g, order);
  execute_axis(data, shape, axis, Direction::forward);
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  const std::size_t n = shape[axis];
  for (std::size_t idx = 0; idx < total; ++idx) data[idx] *= mult[(idx / inner) % n];
  execute_axis(data, shape, axis, Direction::backward);
}

}  // namespace

std::vector<cplx> derivative(const SpatialGrid& g, std::span<const cplx> f, int order) {
  if (f.size() != g.n()) throw InvalidParameter("sample count does not match grid");
  std::vector<cplx> out(f.begin(), f.end());
  derivative_nd(out.data(), {g.n()}, 0, g, order);
  return out;
}

std::vector<double> derivative(const SpatialGrid& g, std::span<const double> f, int order) {
  std::vector<cplx> c(f.begin(), f.end());
  auto d = derivative(g, std::span<const cplx>(c), order);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

void derivative_axis(Array2<cplx>& a, const SpatialGrid& g, std::size_t axis, int order) {
  const std::size_t n = axis == 0 ? a.rows : a.cols;
  if (n != g.n()) throw InvalidParameter("axis length does not match grid");
  derivative_nd(a.data.data(), {a.rows, a.cols}, axis, g, order);
}

std::vector<cplx> partial(const Box& b, std::span<const cplx> f, std::size_t axis, int order) {
  if (f.size() != b.size()) throw InvalidParameter("sample count does not match box");
  if (axis >= b.dim()) throw InvalidParameter("axis out of range");
  std::vector<cplx> out(f.begin(), f.end());
  derivative_nd(out.data(), b.shape(), axis, b.axes[axis], order);
  return out;
}

std::vector<double> partial(const Box& b, std::span<const double> f, std::size_t axis, int order) {
  std::vector<cplx> c(f.begin(), f.end());
  auto d = partial(b, std::span<const cplx>(c), axis, order);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

std::vector<double> laplacian(const Box& b, std::span<const double> f) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t a = 0; a < b.dim(); ++a) {
    auto d2 = partial(b, f, a, 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d2[i];
  }
  return out;
}

std::vector<cplx> spectrum_of(std::span<const cplx> f) {
  std::vector<cplx> s(f.begin(), f.end());
  execute_all(s.data(), {s.size()}, Direction::forward);
  return s;
}

void shifted_from_spectrum(const SpatialGrid& g, std::span<const cplx> spectrum, double shift,
                           std::span<cplx> out) {
  const std::size_t n = g.n();
  if (spectrum.size() != n || out.size() != n) throw InvalidParameter("size mismatch in shift");
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = fft_wavenumber(j, g);
    // Nyquist term as a cosine keeps real data real after the shift.
    const cplx ph = (j == n / 2) ? cplx(std::cos(k * shift), 0.0) : std::polar(1.0, k * shift);
    out[j] = spectrum[j] * ph * inv_n;
  }
  execute_all(out.data(), {n}, Direction::backward);
}

}  // namespace semiwig::fft
