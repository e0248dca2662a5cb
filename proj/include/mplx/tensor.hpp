#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "mplx/common.hpp"

namespace mplx {

/// Dense row-major tensor of 64-bit floats.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  bool requires_grad = false;

  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape) {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(numel_of(t.shape), 0.0);
    return t;
  }

  static Tensor full(std::vector<std::size_t> shape, double value) {
    Tensor t = zeros(std::move(shape));
    for (auto& x : t.data) x = value;
    return t;
  }

  static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data) {
    if (numel_of(shape) != data.size())
      throw ShapeError("Tensor::from_data: shape/data size mismatch");
    Tensor t;
    t.shape = std::move(shape);
    t.data = std::move(data);
    t.check_finite("Tensor::from_data");
    return t;
  }

  /// 2-D literal convenience for tests.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows_init) {
    std::size_t r = rows_init.size();
    std::size_t c = r ? rows_init.begin()->size() : 0;
    Tensor t = zeros({r, c});
    std::size_t i = 0;
    for (const auto& row : rows_init) {
      if (row.size() != c) throw ShapeError("Tensor::matrix: ragged rows");
      for (double v : row) t.data[i++] = v;
    }
    t.check_finite("Tensor::matrix");
    return t;
  }

  static Tensor identity(std::size_t n) {
    Tensor t = zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) t.data[i * n + i] = 1.0;
    return t;
  }

  static Tensor scalar(double v) { return from_data({1}, {v}); }

  static std::size_t numel_of(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t rows() const {
    if (rank() != 2) throw ShapeError("rows(): tensor is not 2-D");
    return shape[0];
  }
  std::size_t cols() const {
    if (rank() != 2) throw ShapeError("cols(): tensor is not 2-D");
    return shape[1];
  }

  double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  double item() const {
    if (numel() != 1) throw ShapeError("item(): tensor is not scalar");
    return data[0];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void check_finite(const std::string& where) const {
    if (!all_finite()) throw NumericError(where + ": non-finite entry");
  }
};

inline std::string shape_str(const std::vector<std::size_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

}  // namespace mplx
