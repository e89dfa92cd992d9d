#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "semiwig/array.hpp"
#include "semiwig/grid.hpp"

namespace semiwig::fft {

enum class Direction { forward, backward };

/// Unnormalized in-place DFT along `axis` of a row-major array with the given shape.
/// forward uses e^{-2 pi i jk/n}, backward e^{+2 pi i jk/n}.
void execute_axis(cplx* data, const std::vector<std::size_t>& shape, std::size_t axis, Direction dir);

/// Unnormalized in-place multidimensional DFT over all axes.
void execute_all(cplx* data, const std::vector<std::size_t>& shape, Direction dir);

/// Angular wavenumber of FFT-ordered index j (0, 1, ..., n/2-1, -n/2, ..., -1).
double fft_wavenumber(std::size_t j, const SpatialGrid& g) noexcept;

/// F(k_m) = sum_j f(x_j) e^{-i k_m x_j} dx on the symmetric dual grid (natural order).
std::vector<cplx> forward(const SpatialGrid& g, std::span<const cplx> f);
/// Exact inverse of forward: f(x_j) = (1/2pi) sum_m F(k_m) e^{i k_m x_j} dk.
std::vector<cplx> inverse(const SpatialGrid& g, std::span<const cplx> F);

/// Same transforms applied along one axis of a 2D array (axis 0 = rows, 1 = cols).
void forward_axis(Array2<cplx>& a, const SpatialGrid& g, std::size_t axis);
void inverse_axis(Array2<cplx>& a, const SpatialGrid& g, std::size_t axis);

/// Periodic spectral derivative of integer order >= 0. The Nyquist mode is dropped for odd orders.
std::vector<cplx> derivative(const SpatialGrid& g, std::span<const cplx> f, int order);
std::vector<double> derivative(const SpatialGrid& g, std::span<const double> f, int order);
void derivative_axis(Array2<cplx>& a, const SpatialGrid& g, std::size_t axis, int order);

/// Partial derivative along one axis of a field sampled on a Box.
std::vector<cplx> partial(const Box& b, std::span<const cplx> f, std::size_t axis, int order);
std::vector<double> partial(const Box& b, std::span<const double> f, std::size_t axis, int order);
/// Sum of second partials.
std::vector<double> laplacian(const Box& b, std::span<const double> f);

/// Band-limited trigonometric interpolation: samples f(x_j + shift) for every node.
/// `spectrum` is the FFT-ordered forward DFT of the samples (see spectrum_of).
std::vector<cplx> spectrum_of(std::span<const cplx> f);
void shifted_from_spectrum(const SpatialGrid& g, std::span<const cplx> spectrum, double shift,
                           std::span<cplx> out);

}  // namespace semiwig::fft
