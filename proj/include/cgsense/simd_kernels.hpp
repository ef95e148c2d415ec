#pragma once

#include "cgsense/array.hpp"

// Hot inner loops of the pipeline: gridding scatter/gather rows and pointwise
// complex map operations. Each op has a scalar reference implementation and an
// AVX2 variant selected once at startup (override via CGSENSE_SIMD=scalar|avx2).
//
// The elementwise ops (scatter_row, cmul, rmul, rmul_scalar, conj_mul_add) are
// bit-identical between variants: the AVX2 code performs the same mul/add
// sequence per element, no FMA contraction. gather_row is a reduction whose
// lane-split accumulation reorders the sum; variants agree to a few ulps and
// the equivalence tests pin that bound.

namespace cgsense::kernels {

struct Ops {
  // y[j] += w[j] * s            (complex row += real weights * complex scalar)
  void (*scatter_row)(Cx* y, const double* w, index_t n, Cx s);
  // return sum_j w[j] * y[j]
  Cx (*gather_row)(const Cx* y, const double* w, index_t n);
  // x[j] *= s[j]
  void (*cmul)(Cx* x, const Cx* s, index_t n);
  // x[j] *= r[j]
  void (*rmul)(Cx* x, const double* r, index_t n);
  // x[j] *= a
  void (*rmul_scalar)(Cx* x, double a, index_t n);
  // acc[j] += conj(s[j]) * z[j]  (coil-combine accumulate)
  void (*conj_mul_add)(Cx* acc, const Cx* s, const Cx* z, index_t n);
  const char* name;
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when the CPU lacks AVX2

// Variant chosen at first use: AVX2 when supported, else scalar;
// CGSENSE_SIMD=scalar|avx2 forces the choice (avx2 on unsupported CPUs falls
// back to scalar).
const Ops& active();

}  // namespace cgsense::kernels
