#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cgsense/errors.hpp"

namespace cgsense {

using Cx = std::complex<double>;
using index_t = std::int64_t;

// Dense row-major 2D array. Value semantics; all pipeline types are built on
// these and treated as immutable once constructed.
template <class T>
class Array2D {
public:
  Array2D() = default;
  Array2D(index_t rows, index_t cols, T fill = T{}) : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows * cols), fill) {
    if (rows < 0 || cols < 0) fail_usage("Array2D: negative extent");
  }

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  index_t size() const { return rows_ * cols_; }
  bool empty() const { return v_.empty(); }

  T& operator()(index_t r, index_t c) { return v_[static_cast<size_t>(r * cols_ + c)]; }
  const T& operator()(index_t r, index_t c) const { return v_[static_cast<size_t>(r * cols_ + c)]; }

  T* row(index_t r) { return v_.data() + r * cols_; }
  const T* row(index_t r) const { return v_.data() + r * cols_; }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }
  std::span<T> flat() { return {v_.data(), v_.size()}; }
  std::span<const T> flat() const { return {v_.data(), v_.size()}; }

  template <class U>
  bool same_shape(const Array2D<U>& o) const { return rows_ == o.rows() && cols_ == o.cols(); }

  friend bool operator==(const Array2D& a, const Array2D& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.v_ == b.v_;
  }

private:
  index_t rows_ = 0, cols_ = 0;
  std::vector<T> v_;
};

// Dense row-major 3D array, canonical order [n0][n1][n2].
template <class T>
class Array3D {
public:
  Array3D() = default;
  Array3D(index_t n0, index_t n1, index_t n2, T fill = T{})
      : n0_(n0), n1_(n1), n2_(n2), v_(static_cast<size_t>(n0 * n1 * n2), fill) {
    if (n0 < 0 || n1 < 0 || n2 < 0) fail_usage("Array3D: negative extent");
  }

  index_t dim0() const { return n0_; }
  index_t dim1() const { return n1_; }
  index_t dim2() const { return n2_; }
  index_t size() const { return n0_ * n1_ * n2_; }
  bool empty() const { return v_.empty(); }

  T& operator()(index_t i, index_t j, index_t k) { return v_[static_cast<size_t>((i * n1_ + j) * n2_ + k)]; }
  const T& operator()(index_t i, index_t j, index_t k) const {
    return v_[static_cast<size_t>((i * n1_ + j) * n2_ + k)];
  }

  // Contiguous [n1][n2] slice at fixed first index.
  T* slice(index_t i) { return v_.data() + i * n1_ * n2_; }
  const T* slice(index_t i) const { return v_.data() + i * n1_ * n2_; }

  Array2D<T> slice_copy(index_t i) const {
    Array2D<T> out(n1_, n2_);
    const T* s = slice(i);
    std::copy(s, s + n1_ * n2_, out.data());
    return out;
  }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }
  std::span<T> flat() { return {v_.data(), v_.size()}; }
  std::span<const T> flat() const { return {v_.data(), v_.size()}; }

  friend bool operator==(const Array3D& a, const Array3D& b) {
    return a.n0_ == b.n0_ && a.n1_ == b.n1_ && a.n2_ == b.n2_ && a.v_ == b.v_;
  }

private:
  index_t n0_ = 0, n1_ = 0, n2_ = 0;
  std::vector<T> v_;
};

}  // namespace cgsense
