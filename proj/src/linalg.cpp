#include "cgsense/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "cgsense/errors.hpp"

namespace cgsense::linalg {

bool cholesky(const Array2D<Cx>& a, Array2D<Cx>& lower, index_t& bad_pivot) {
  const index_t n = a.rows();
  if (a.cols() != n) fail_data("cholesky: matrix must be square");
  lower = Array2D<Cx>(n, n);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j <= i; ++j) {
      Cx sum = a(i, j);
      for (index_t k = 0; k < j; ++k) sum -= lower(i, k) * std::conj(lower(j, k));
      if (i == j) {
        const double d = sum.real();
        if (d <= 0.0 || !std::isfinite(d)) {
          bad_pivot = i;
          return false;
        }
        lower(i, i) = Cx{std::sqrt(d), 0.0};
      } else {
        lower(i, j) = sum / lower(j, j);
      }
    }
  }
  return true;
}

Array2D<Cx> invert_lower(const Array2D<Cx>& lower) {
  const index_t n = lower.rows();
  Array2D<Cx> inv(n, n);
  for (index_t col = 0; col < n; ++col) {
    inv(col, col) = 1.0 / lower(col, col);
    for (index_t i = col + 1; i < n; ++i) {
      Cx sum{0.0, 0.0};
      for (index_t k = col; k < i; ++k) sum += lower(i, k) * inv(k, col);
      inv(i, col) = -sum / lower(i, i);
    }
  }
  return inv;
}

std::vector<double> hermitian_eigenvalues(const Array2D<Cx>& input) {
  Array2D<Cx> a = input;
  const index_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (index_t p = 0; p < n; ++p) {
      for (index_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    }
    if (off < 1e-24) break;
    for (index_t p = 0; p < n; ++p) {
      for (index_t q = p + 1; q < n; ++q) {
        const Cx apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        // Unitary 2x2 rotation annihilating a(p,q): diagonalize the Hermitian
        // block [[app, apq],[conj(apq), aqq]].
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
        const double c = std::cos(theta), s = std::sin(theta);
        const Cx phase = apq / std::abs(apq);
        const Cx sp = s * phase;
        for (index_t k = 0; k < n; ++k) {
          const Cx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + std::conj(sp) * akq;
          a(k, q) = -sp * akp + c * akq;
        }
        for (index_t k = 0; k < n; ++k) {
          const Cx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + sp * aqk;
          a(q, k) = -std::conj(sp) * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

Array2D<Cx> matmul(const Array2D<Cx>& a, const Array2D<Cx>& b) {
  if (a.cols() != b.rows()) fail_data("matmul: inner dimensions disagree");
  Array2D<Cx> c(a.rows(), b.cols());
  for (index_t i = 0; i < a.rows(); ++i) {
    for (index_t k = 0; k < a.cols(); ++k) {
      const Cx aik = a(i, k);
      if (aik == Cx{}) continue;
      for (index_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Array2D<Cx> adjoint(const Array2D<Cx>& a) {
  Array2D<Cx> t(a.cols(), a.rows());
  for (index_t i = 0; i < a.rows(); ++i) {
    for (index_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  }
  return t;
}

}  // namespace cgsense::linalg
