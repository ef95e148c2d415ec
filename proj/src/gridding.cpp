#include "cgsense/gridding.hpp"

#include <cmath>

#include "cgsense/errors.hpp"
#include "cgsense/fft.hpp"
#include "cgsense/simd_kernels.hpp"

namespace cgsense {
namespace {

// Modified Bessel I0 by power series; converges quickly for the beta range
// produced by practical widths (< 30).
double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

struct TapRange {
  int lo, n;             // first grid index and tap count
  double w[18];          // per-axis kernel weights (width capped at 16)
};

inline TapRange axis_taps(double center, const GriddingKernel& kernel, int grid_size) {
  const double half = kernel.width / 2.0;
  int lo = static_cast<int>(std::ceil(center - half));
  int hi = static_cast<int>(std::floor(center + half));
  if (lo < 0) lo = 0;
  if (hi > grid_size - 1) hi = grid_size - 1;
  TapRange t{lo, hi >= lo ? hi - lo + 1 : 0, {}};
  for (int j = 0; j < t.n; ++j) t.w[j] = kernel.at(std::abs(static_cast<double>(lo + j) - center));
  return t;
}

}  // namespace

GriddingKernel build_kernel(int width, int n_table_points, double oversampling_ratio,
                            GriddingKernel::Lookup lookup) {
  if (width < 2 || width > 16) fail_data("build_kernel: width must be in [2, 16]");
  if (n_table_points < 100) fail_data("build_kernel: need at least 100 table points");
  if (oversampling_ratio <= 1.0) fail_data("build_kernel: oversampling ratio must exceed 1");

  GriddingKernel k;
  k.width = width;
  k.lookup = lookup;
  // Beatty et al. 2005: beta = pi*sqrt((W/alpha)^2*(alpha-1/2)^2 - 0.8).
  const double wa = static_cast<double>(width) / oversampling_ratio;
  const double arg = wa * wa * (oversampling_ratio - 0.5) * (oversampling_ratio - 0.5) - 0.8;
  if (arg <= 0.0) fail_numeric("build_kernel: degenerate shape parameter");
  k.shape_beta = M_PI * std::sqrt(arg);

  const double norm = bessel_i0(k.shape_beta);
  k.table.resize(static_cast<size_t>(n_table_points));
  for (int i = 0; i < n_table_points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n_table_points - 1);  // 2r/W in [0,1]
    k.table[static_cast<size_t>(i)] = bessel_i0(k.shape_beta * std::sqrt(1.0 - frac * frac)) / norm;
  }
  return k;
}

Apodization compute_apodization(const GriddingKernel& kernel, const GridGeometry& geometry) {
  const int n_os = geometry.grid_size;
  if (n_os < 2 || n_os % 2 != 0) fail_data("compute_apodization: grid size must be even");

  std::vector<Cx> spike(static_cast<size_t>(n_os), Cx{0.0, 0.0});
  const int c = n_os / 2;
  const int hw = static_cast<int>(std::floor(kernel.width / 2.0));
  for (int d = -hw; d <= hw; ++d) {
    spike[static_cast<size_t>(c + d)] = Cx{kernel.at(std::abs(static_cast<double>(d))), 0.0};
  }
  const std::vector<Cx> ft = ifft_centered_1d(spike);

  Apodization a;
  a.axis.resize(static_cast<size_t>(n_os));
  double peak = 0.0;
  for (int i = 0; i < n_os; ++i) {
    a.axis[static_cast<size_t>(i)] = std::abs(ft[static_cast<size_t>(i)]);
    peak = std::max(peak, a.axis[static_cast<size_t>(i)]);
  }
  for (double& v : a.axis) v /= peak;

  a.map = Array2D<double>(n_os, n_os);
  for (int r = 0; r < n_os; ++r) {
    for (int col = 0; col < n_os; ++col) {
      a.map(r, col) = a.axis[static_cast<size_t>(r)] * a.axis[static_cast<size_t>(col)];
    }
  }

  // The deconvolution divides by this map inside the target FOV; it must not
  // vanish there.
  const int lo = (n_os - geometry.matrix_size) / 2;
  const int hi = lo + geometry.matrix_size;
  for (int i = lo; i < hi; ++i) {
    if (a.axis[static_cast<size_t>(i)] <= 1e-12) {
      fail_numeric("compute_apodization: roll-off vanishes inside the target FOV");
    }
  }
  return a;
}

GridResult grid_adjoint(const Array2D<Cx>& samples, const Array3D<double>& trajectory,
                        const GriddingKernel& kernel, const GridGeometry& geometry,
                        std::span<const double> weights) {
  const index_t ns = trajectory.dim1(), nr = trajectory.dim2();
  if (samples.rows() != ns || samples.cols() != nr) fail_data("grid_adjoint: samples/trajectory shape mismatch");
  if (!weights.empty() && static_cast<index_t>(weights.size()) != ns * nr) {
    fail_data("grid_adjoint: weights length mismatch");
  }
  const int n_os = geometry.grid_size;
  const double center = n_os / 2.0;
  const double rmax2 = center * center;
  const auto& ops = kernels::active();

  GridResult out;
  out.grid = Array2D<Cx>(n_os, n_os);
  out.total = ns * nr;
  for (index_t s = 0; s < ns; ++s) {
    for (index_t r = 0; r < nr; ++r) {
      const double kx = trajectory(0, s, r), ky = trajectory(1, s, r);
      if (kx * kx + ky * ky > rmax2) {
        ++out.dropped;
        continue;
      }
      Cx v = samples(s, r);
      if (!weights.empty()) v *= weights[static_cast<size_t>(s * nr + r)];
      const TapRange tx = axis_taps(kx + center, kernel, n_os);
      const TapRange ty = axis_taps(ky + center, kernel, n_os);
      for (int jy = 0; jy < ty.n; ++jy) {
        ops.scatter_row(out.grid.row(ty.lo + jy) + tx.lo, tx.w, tx.n, v * ty.w[jy]);
      }
    }
  }
  return out;
}

DegridResult degrid_forward(const Array2D<Cx>& cartesian, const Array3D<double>& trajectory,
                            const GriddingKernel& kernel, const GridGeometry& geometry,
                            std::span<const double> weights) {
  const index_t ns = trajectory.dim1(), nr = trajectory.dim2();
  const int n_os = geometry.grid_size;
  if (cartesian.rows() != n_os || cartesian.cols() != n_os) fail_data("degrid_forward: grid size mismatch");
  if (!weights.empty() && static_cast<index_t>(weights.size()) != ns * nr) {
    fail_data("degrid_forward: weights length mismatch");
  }
  const double center = n_os / 2.0;
  const double rmax2 = center * center;
  const auto& ops = kernels::active();

  DegridResult out;
  out.samples = Array2D<Cx>(ns, nr);
  out.total = ns * nr;
  for (index_t s = 0; s < ns; ++s) {
    for (index_t r = 0; r < nr; ++r) {
      const double kx = trajectory(0, s, r), ky = trajectory(1, s, r);
      if (kx * kx + ky * ky > rmax2) {
        ++out.dropped;
        continue;
      }
      const TapRange tx = axis_taps(kx + center, kernel, n_os);
      const TapRange ty = axis_taps(ky + center, kernel, n_os);
      Cx acc{0.0, 0.0};
      for (int jy = 0; jy < ty.n; ++jy) {
        acc += ty.w[jy] * ops.gather_row(cartesian.row(ty.lo + jy) + tx.lo, tx.w, tx.n);
      }
      if (!weights.empty()) acc *= weights[static_cast<size_t>(s * nr + r)];
      out.samples(s, r) = acc;
    }
  }
  return out;
}

}  // namespace cgsense
