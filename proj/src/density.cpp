#include "cgsense/density.hpp"

#include <cmath>

#include "cgsense/errors.hpp"

namespace cgsense {

DensityWeights dcf_gridded_ones(const Array3D<double>& trajectory, const GriddingKernel& kernel,
                                const GridGeometry& geometry) {
  const index_t ns = trajectory.dim1(), nr = trajectory.dim2();

  double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
  for (index_t s = 0; s < ns; ++s) {
    for (index_t r = 0; r < nr; ++r) {
      lox = std::min(lox, trajectory(0, s, r));
      hix = std::max(hix, trajectory(0, s, r));
      loy = std::min(loy, trajectory(1, s, r));
      hiy = std::max(hiy, trajectory(1, s, r));
    }
  }
  if (hix - lox < 1e-12 && hiy - loy < 1e-12) {
    fail_data("dcf_gridded_ones: degenerate trajectory (all points coincident)");
  }

  Array2D<Cx> ones(ns, nr, Cx{1.0, 0.0});
  GridResult density = grid_adjoint(ones, trajectory, kernel, geometry);
  DegridResult back = degrid_forward(density.grid, trajectory, kernel, geometry);

  double dmax = 0.0;
  for (const Cx& v : back.samples.flat()) dmax = std::max(dmax, v.real());
  if (dmax <= 0.0) fail_numeric("dcf_gridded_ones: empty density estimate");
  const double floor = 1e-8 * dmax;

  DensityWeights out;
  out.weights = Array2D<double>(ns, nr);
  double wmax = 0.0;
  for (index_t i = 0; i < back.samples.size(); ++i) {
    const double d = back.samples.data()[i].real();
    const double w = d > floor ? 1.0 / d : 0.0;
    out.weights.data()[i] = w;
    wmax = std::max(wmax, w);
  }
  for (double& w : out.weights.flat()) w /= wmax;
  return out;
}

DensityWeights dcf_ramp(const Array3D<double>& trajectory) {
  const index_t ns = trajectory.dim1(), nr = trajectory.dim2();
  DensityWeights out;
  out.weights = Array2D<double>(ns, nr);
  double wmax = 0.0;
  for (index_t s = 0; s < ns; ++s) {
    double spoke_min_pos = 0.0;
    for (index_t r = 0; r < nr; ++r) {
      const double w = std::hypot(trajectory(0, s, r), trajectory(1, s, r), trajectory(2, s, r));
      out.weights(s, r) = w;
      if (w > 0.0 && (spoke_min_pos == 0.0 || w < spoke_min_pos)) spoke_min_pos = w;
      wmax = std::max(wmax, w);
    }
    if (spoke_min_pos > 0.0) {
      for (index_t r = 0; r < nr; ++r) {
        if (out.weights(s, r) == 0.0) out.weights(s, r) = spoke_min_pos;
      }
    }
  }
  if (wmax <= 0.0) {
    // All-zero trajectory: uniform weights rather than a division by zero.
    for (double& w : out.weights.flat()) w = 1.0;
    return out;
  }
  for (double& w : out.weights.flat()) w /= wmax;
  return out;
}

}  // namespace cgsense
