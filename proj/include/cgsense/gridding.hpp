#pragma once

#include <optional>
#include <span>

#include "cgsense/types.hpp"

namespace cgsense {

// Precomputed Kaiser-Bessel convolution kernel, tabulated over radius
// [0, width/2] and looked up per axis (separable gridding). shape_beta follows
// Beatty's aliasing-minimizing choice for the given oversampling ratio.
struct GriddingKernel {
  int width = 5;
  double shape_beta = 0.0;
  std::vector<double> table;  // table[0] = 1 = max, monotone non-increasing
  enum class Lookup { nearest, linear } lookup = Lookup::linear;

  double radius() const { return width / 2.0; }

  // Kernel value at |r| grid cells from the sample; 0 beyond width/2.
  double at(double r) const {
    const double half = width / 2.0;
    if (r >= half) return 0.0;
    const double t = r * static_cast<double>(table.size() - 1) / half;
    if (lookup == Lookup::nearest) {
      return table[static_cast<size_t>(t + 0.5)];
    }
    const size_t i = static_cast<size_t>(t);
    const double f = t - static_cast<double>(i);
    const double lo = table[i];
    const double hi = i + 1 < table.size() ? table[i + 1] : 0.0;
    return lo + f * (hi - lo);
  }
};

GriddingKernel build_kernel(int width, int n_table_points, double oversampling_ratio,
                            GriddingKernel::Lookup lookup = GriddingKernel::Lookup::linear);

// Image-space roll-off of the gridding convolution: |centered inverse FFT of
// the kernel placed at the grid center|, separable outer product, normalized
// to max 1. Strictly positive over the target FOV (checked at construction).
struct Apodization {
  Array2D<double> map;        // [n_os][n_os], max = 1
  std::vector<double> axis;   // 1D profile the map is the outer product of
};

Apodization compute_apodization(const GriddingKernel& kernel, const GridGeometry& geometry);

// One coil of samples convolved onto the oversampled grid. Samples with
// k-radius > n_os/2 are dropped and counted, never wrapped; boundary taps of
// in-bounds samples are clipped. Optional per-sample weights multiply the
// sample values.
struct GridResult {
  Array2D<Cx> grid;
  index_t dropped = 0;
  index_t total = 0;
  double dropped_fraction() const { return total ? static_cast<double>(dropped) / static_cast<double>(total) : 0.0; }
};

GridResult grid_adjoint(const Array2D<Cx>& samples, const Array3D<double>& trajectory,
                        const GriddingKernel& kernel, const GridGeometry& geometry,
                        std::span<const double> weights = {});

// Exact adjoint of grid_adjoint: reads the Cartesian grid back at each sample
// location with the same taps and drop rule.
struct DegridResult {
  Array2D<Cx> samples;
  index_t dropped = 0;
  index_t total = 0;
};

DegridResult degrid_forward(const Array2D<Cx>& cartesian, const Array3D<double>& trajectory,
                            const GriddingKernel& kernel, const GridGeometry& geometry,
                            std::span<const double> weights = {});

}  // namespace cgsense
