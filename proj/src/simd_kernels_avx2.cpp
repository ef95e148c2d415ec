// AVX2 variants of the inner-loop kernels. Built with -mavx2 for this one
// translation unit only; execution is gated by the runtime dispatcher.
// Complex doubles are interleaved (re, im), two per 256-bit lane.

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include "cgsense/simd_kernels.hpp"

namespace cgsense::kernels {
namespace {

// [w0, w0, w1, w1] from two consecutive weights.
inline __m256d dup_pairs(const double* w) {
  __m128d v = _mm_loadu_pd(w);
  return _mm256_set_m128d(_mm_unpackhi_pd(v, v), _mm_unpacklo_pd(v, v));
}

void scatter_row_avx2(Cx* y, const double* w, index_t n, Cx s) {
  double* yd = reinterpret_cast<double*>(y);
  const __m256d sv = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(&s));
  index_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m256d acc = _mm256_loadu_pd(yd + 2 * j);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(dup_pairs(w + j), sv));
    _mm256_storeu_pd(yd + 2 * j, acc);
  }
  for (; j < n; ++j) {
    yd[2 * j] += w[j] * s.real();
    yd[2 * j + 1] += w[j] * s.imag();
  }
}

Cx gather_row_avx2(const Cx* y, const double* w, index_t n) {
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc = _mm256_setzero_pd();
  index_t j = 0;
  for (; j + 2 <= n; j += 2) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(dup_pairs(w + j), _mm256_loadu_pd(yd + 2 * j)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double ar = lanes[0] + lanes[2];
  double ai = lanes[1] + lanes[3];
  for (; j < n; ++j) {
    ar += w[j] * yd[2 * j];
    ai += w[j] * yd[2 * j + 1];
  }
  return {ar, ai};
}

void cmul_avx2(Cx* x, const Cx* s, index_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const double* sd = reinterpret_cast<const double*>(s);
  index_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * j);   // xr0 xi0 xr1 xi1
    const __m256d sv = _mm256_loadu_pd(sd + 2 * j);   // sr0 si0 sr1 si1
    const __m256d sr = _mm256_unpacklo_pd(sv, sv);    // sr0 sr0 sr1 sr1
    const __m256d si = _mm256_unpackhi_pd(sv, sv);    // si0 si0 si1 si1
    const __m256d xswap = _mm256_shuffle_pd(xv, xv, 0x5);  // xi0 xr0 xi1 xr1
    // (xr*sr - xi*si, xi*sr + xr*si) via addsub
    const __m256d res = _mm256_addsub_pd(_mm256_mul_pd(xv, sr), _mm256_mul_pd(xswap, si));
    _mm256_storeu_pd(xd + 2 * j, res);
  }
  for (; j < n; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    const double sr = s[j].real(), si = s[j].imag();
    x[j] = {xr * sr - xi * si, xr * si + xi * sr};
  }
}

void rmul_avx2(Cx* x, const double* r, index_t n) {
  double* xd = reinterpret_cast<double*>(x);
  index_t j = 0;
  for (; j + 2 <= n; j += 2) {
    __m256d v = _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * j), dup_pairs(r + j));
    _mm256_storeu_pd(xd + 2 * j, v);
  }
  for (; j < n; ++j) {
    xd[2 * j] *= r[j];
    xd[2 * j + 1] *= r[j];
  }
}

void rmul_scalar_avx2(Cx* x, double a, index_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const __m256d av = _mm256_set1_pd(a);
  index_t j = 0;
  for (; j + 2 <= n; j += 2) {
    _mm256_storeu_pd(xd + 2 * j, _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * j), av));
  }
  for (; j < n; ++j) {
    xd[2 * j] *= a;
    xd[2 * j + 1] *= a;
  }
}

void conj_mul_add_avx2(Cx* acc, const Cx* s, const Cx* z, index_t n) {
  double* ad = reinterpret_cast<double*>(acc);
  const double* sd = reinterpret_cast<const double*>(s);
  const double* zd = reinterpret_cast<const double*>(z);
  const __m256d neg_im = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);  // flips lanes 1,3
  index_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d sv = _mm256_xor_pd(_mm256_loadu_pd(sd + 2 * j), neg_im);  // conj(s)
    const __m256d zv = _mm256_loadu_pd(zd + 2 * j);
    const __m256d sr = _mm256_unpacklo_pd(sv, sv);
    const __m256d si = _mm256_unpackhi_pd(sv, sv);
    const __m256d zswap = _mm256_shuffle_pd(zv, zv, 0x5);
    const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(zv, sr), _mm256_mul_pd(zswap, si));
    _mm256_storeu_pd(ad + 2 * j, _mm256_add_pd(_mm256_loadu_pd(ad + 2 * j), prod));
  }
  for (; j < n; ++j) {
    const double sr = sd[2 * j], si = -sd[2 * j + 1];
    const double zr = zd[2 * j], zi = zd[2 * j + 1];
    ad[2 * j] += zr * sr - zi * si;
    ad[2 * j + 1] += zi * sr + zr * si;
  }
}

}  // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops{scatter_row_avx2, gather_row_avx2, cmul_avx2,
                       rmul_avx2,        rmul_scalar_avx2, conj_mul_add_avx2,
                       "avx2"};
  return &ops;
}

}  // namespace cgsense::kernels

#else

#include "cgsense/simd_kernels.hpp"

namespace cgsense::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace cgsense::kernels

#endif
