#include "cgsense/simd_kernels.hpp"

namespace cgsense::kernels {
namespace {

void scatter_row_scalar(Cx* y, const double* w, index_t n, Cx s) {
  const double sr = s.real(), si = s.imag();
  double* yd = reinterpret_cast<double*>(y);
  for (index_t j = 0; j < n; ++j) {
    yd[2 * j] += w[j] * sr;
    yd[2 * j + 1] += w[j] * si;
  }
}

Cx gather_row_scalar(const Cx* y, const double* w, index_t n) {
  double ar = 0.0, ai = 0.0;
  const double* yd = reinterpret_cast<const double*>(y);
  for (index_t j = 0; j < n; ++j) {
    ar += w[j] * yd[2 * j];
    ai += w[j] * yd[2 * j + 1];
  }
  return {ar, ai};
}

void cmul_scalar(Cx* x, const Cx* s, index_t n) {
  for (index_t j = 0; j < n; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    const double sr = s[j].real(), si = s[j].imag();
    x[j] = {xr * sr - xi * si, xr * si + xi * sr};
  }
}

void rmul_scalar_arr(Cx* x, const double* r, index_t n) {
  double* xd = reinterpret_cast<double*>(x);
  for (index_t j = 0; j < n; ++j) {
    xd[2 * j] *= r[j];
    xd[2 * j + 1] *= r[j];
  }
}

void rmul_scalar_one(Cx* x, double a, index_t n) {
  double* xd = reinterpret_cast<double*>(x);
  for (index_t j = 0; j < 2 * n; ++j) xd[j] *= a;
}

void conj_mul_add_scalar(Cx* acc, const Cx* s, const Cx* z, index_t n) {
  for (index_t j = 0; j < n; ++j) {
    const double sr = s[j].real(), si = s[j].imag();
    const double zr = z[j].real(), zi = z[j].imag();
    acc[j] += Cx{sr * zr + si * zi, sr * zi - si * zr};
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{scatter_row_scalar, gather_row_scalar, cmul_scalar,
                       rmul_scalar_arr,    rmul_scalar_one,   conj_mul_add_scalar,
                       "scalar"};
  return ops;
}

}  // namespace cgsense::kernels
