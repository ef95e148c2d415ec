#pragma once

#include <optional>

#include "cgsense/types.hpp"

namespace cgsense {

// Checks every dataset invariant and reports all violations (never throws).
ValidationReport validate_dataset(const KSpaceDataset& raw);

// Geometry from a trajectory given in oversampled-grid-index units (one unit
// = one grid cell, DC at 0): grid_size = 2*max radius rounded up to even,
// matrix_size = grid_size / ratio rounded to even. Without an override the
// ratio is inferred from the readout sample spacing (unit spacing => 1).
// Throws on an all-zero trajectory.
GridGeometry derive_geometry(const Array3D<double>& trajectory,
                             std::optional<double> oversampling_ratio = std::nullopt);

// Median distance between consecutive readout points within spokes; the
// robust estimate of the k-space sample spacing in the supplied units.
double readout_spacing(const Array3D<double>& trajectory);

// Scales a trajectory so the readout spacing becomes one grid cell and
// returns the applied factor (= inferred oversampling ratio). Challenge-style
// files store k in target-FOV grid units (entries +-N/2, spacing 1/ratio);
// this is the explicit conversion -- never applied silently.
struct RescaledTrajectory {
  Array3D<double> trajectory;
  double factor = 1.0;
};
RescaledTrajectory rescale_to_grid_units(const Array3D<double>& trajectory);

// rescale_to_grid_units + derive_geometry with the inferred ratio.
GridGeometry derive_geometry_auto(const Array3D<double>& trajectory);

enum class UndersampleScheme { skip_every_rth, first_p_spokes };

// Spoke subsetting; factor r keeps spokes 0, r, 2r, ..., count p keeps the
// first p. Sample values are shared (copied) with the source, trajectory and
// samples stay consistent.
KSpaceDataset undersample(const KSpaceDataset& raw, UndersampleScheme scheme, index_t factor_or_count);

}  // namespace cgsense
