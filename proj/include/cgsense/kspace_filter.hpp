#pragma once

#include "cgsense/types.hpp"

namespace cgsense {

// Post-reconstruction k-space filter. k_c is either in grid cells of the
// image k-space or a fraction of the half-FOV (1.0 = Nyquist edge), covering
// the normalized-cutoff conventions used in practice.
struct FilterSpec {
  enum class Kind { none, arctan, hard_circle } kind = Kind::none;
  enum class Unit { grid_cells, fraction_half_fov } unit = Unit::grid_cells;
  double k_c = 0.0;
  double beta = 100.0;

  static FilterSpec none() { return {}; }
  static FilterSpec arctan(double k_c, Unit unit = Unit::grid_cells, double beta = 100.0) {
    return {Kind::arctan, unit, k_c, beta};
  }
  static FilterSpec hard_circle(double k_c, Unit unit = Unit::grid_cells) { return {Kind::hard_circle, unit, k_c, 100.0}; }
};

// Per-cell weights on the n x n image k-space grid, DC at (n/2, n/2).
// The arctan form is 0.5 + atan(beta*(k_c - |k|)/k_c)/pi, exactly 0.5 at
// |k| = k_c; the hard circle is the indicator of |k| <= k_c.
Array2D<double> filter_weights(const FilterSpec& spec, const GridGeometry& geometry);

// fft -> weight -> ifft roundtrip on the reconstructed image.
Image apply_filter(const Image& image, const FilterSpec& spec, const GridGeometry& geometry);

}  // namespace cgsense
