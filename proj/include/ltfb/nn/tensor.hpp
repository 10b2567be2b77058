// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ltfb/core/error.hpp"

namespace ltfb::nn {

/// Dense row-major tensor. `product(shape) == data.size()` always holds for
/// tensors produced by this module. Rank 2 is the workhorse (batches of
/// rows); rank 1 holds bias vectors.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(element_count(shape), T{0});
  }

  Tensor(std::initializer_list<std::size_t> s)
      : Tensor(std::vector<std::size_t>(s)) {}

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  static Tensor from_data(std::vector<std::size_t> s, std::vector<T> d) {
    if (element_count(s) != d.size())
      throw DimensionError("tensor data length does not match shape");
    Tensor t;
    t.shape = std::move(s);
    t.data = std::move(d);
    return t;
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  std::size_t rows() const {
    require_rank2();
    return shape[0];
  }
  std::size_t cols() const {
    require_rank2();
    return shape[1];
  }

  T& operator()(std::size_t r, std::size_t c) {
    return data[r * shape[1] + c];
  }
  T operator()(std::size_t r, std::size_t c) const {
    return data[r * shape[1] + c];
  }

  T& operator[](std::size_t i) { return data[i]; }
  T operator[](std::size_t i) const { return data[i]; }

  bool all_finite() const {
    for (const T& v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

 private:
  void require_rank2() const {
    if (shape.size() != 2)
      throw DimensionError("expected a rank-2 tensor, got rank " +
                           std::to_string(shape.size()));
  }
};

namespace detail {
template <typename T>
using EigenMat =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<EigenMat<T>>;
template <typename T>
using CMap = Eigen::Map<const EigenMat<T>>;

template <typename T>
CMap<T> cmap(const Tensor<T>& t) {
  return CMap<T>(t.data.data(), static_cast<Eigen::Index>(t.rows()),
                 static_cast<Eigen::Index>(t.cols()));
}
template <typename T>
Map<T> map(Tensor<T>& t) {
  return Map<T>(t.data.data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

inline std::string dim_str(std::size_t r, std::size_t c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}
}  // namespace detail

/// C = A * B.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + detail::dim_str(a.rows(), a.cols()) +
                         " times " + detail::dim_str(b.rows(), b.cols()));
  Tensor<T> c({a.rows(), b.cols()});
  detail::map(c).noalias() = detail::cmap(a) * detail::cmap(b);
  return c;
}

/// C = A^T * B (used for weight gradients).
template <typename T>
Tensor<T> matmul_tn(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rows() != b.rows())
    throw DimensionError("matmul_tn: " + detail::dim_str(a.rows(), a.cols()) +
                         " vs " + detail::dim_str(b.rows(), b.cols()));
  Tensor<T> c({a.cols(), b.cols()});
  detail::map(c).noalias() = detail::cmap(a).transpose() * detail::cmap(b);
  return c;
}

/// C = A * B^T (used for input gradients).
template <typename T>
Tensor<T> matmul_nt(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.cols() != b.cols())
    throw DimensionError("matmul_nt: " + detail::dim_str(a.rows(), a.cols()) +
                         " vs " + detail::dim_str(b.rows(), b.cols()));
  Tensor<T> c({a.rows(), b.rows()});
  detail::map(c).noalias() = detail::cmap(a) * detail::cmap(b).transpose();
  return c;
}

/// Adds a length-C bias vector to every row of an R x C tensor.
template <typename T>
void add_row_vector(Tensor<T>& m, const Tensor<T>& bias) {
  if (bias.size() != m.cols())
    throw DimensionError("bias length " + std::to_string(bias.size()) +
                         " does not match column count " +
                         std::to_string(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) += bias[c];
}

/// Column sums of an R x C tensor as a rank-1 tensor (bias gradients).
template <typename T>
Tensor<T> col_sums(const Tensor<T>& m) {
  Tensor<T> out({m.cols()});
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m(r, c);
  return out;
}

/// Stacks two tensors with equal column counts on top of each other.
template <typename T>
Tensor<T> vstack(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.cols() != b.cols())
    throw DimensionError("vstack: column counts differ");
  Tensor<T> out({a.rows() + b.rows(), a.cols()});
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

}  // namespace ltfb::nn
