#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace semiwig {

using cplx = std::complex<double>;

/// Dense row-major 2D array. Row index is x, column index is the second variable.
template <class T>
struct Array2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Array2() = default;
  Array2(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  T* row(std::size_t i) { return data.data() + i * cols; }
  const T* row(std::size_t i) const { return data.data() + i * cols; }
  std::size_t size() const { return data.size(); }
};

}  // namespace semiwig
