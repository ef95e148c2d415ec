#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cgsense/array.hpp"

namespace cgsense {

// Reconstructed / simulated image: square complex pixel grid.
using Image = Array2D<Cx>;

// Geometry of the reconstruction grids, derived from the trajectory.
// matrix_size is the target FOV in pixels, grid_size the oversampled grid.
struct GridGeometry {
  int matrix_size = 0;             // n
  int grid_size = 0;               // n_os, always even
  double oversampling_ratio = 1.;  // n_os / n up to integer rounding
  double delta_k = 0.;             // k-space cell of the oversampled grid, 1/FOV_os

  int half_grid() const { return grid_size / 2; }
};

// Multi-coil non-Cartesian acquisition. Canonical in-memory order is
// [coil][spoke][read] for samples and [axis(x,y,z)][spoke][read] for the
// trajectory; the container reader permutes from the on-disk BART order.
// Trajectory values are k-space positions in oversampled-grid-index units
// (one unit = one grid cell = 1/FOV_os, DC at 0). Axis order is assumed
// (x, y, z); files with other conventions need an explicit permutation
// before construction.
struct KSpaceDataset {
  Array3D<Cx> samples;                         // [coil][spoke][read]
  Array3D<double> trajectory;                  // [3][spoke][read], z == 0 for 2D
  std::optional<Array3D<Cx>> sensitivities;    // [coil][row][col]
  std::optional<Array2D<Cx>> noise_covariance; // [coil][coil], Hermitian
  bool whitened = false;

  index_t n_coils() const { return samples.dim0(); }
  index_t n_spokes() const { return samples.dim1(); }
  index_t n_read() const { return samples.dim2(); }
};

struct ValidationReport {
  std::vector<std::string> findings;
  bool ok() const { return findings.empty(); }
  std::string joined() const {
    std::string s;
    for (const auto& f : findings) {
      if (!s.empty()) s += "; ";
      s += f;
    }
    return s;
  }
};

}  // namespace cgsense
