#pragma once

#include "cgsense/density.hpp"
#include "cgsense/nufft.hpp"
#include "cgsense/types.hpp"

namespace cgsense {

// Per-coil complex sensitivity maps plus the derived L2-norm intensity field
// and a support mask. intensity(p) == sqrt(sum_c |maps(c,p)|^2) always holds;
// maps are zero off the mask. SoS-estimated maps keep each coil's native
// phase, so reconstructed image phase is relative.
struct SensitivitySet {
  Array3D<Cx> maps;            // [coil][row][col]
  Array2D<double> intensity;   // [row][col]
  Array2D<uint8_t> support;    // [row][col], 1 inside

  index_t n_coils() const { return maps.dim0(); }
  index_t n() const { return maps.dim1(); }
};

// Builds the derived fields from raw maps. Without an explicit mask the
// support is everywhere the intensity is positive.
SensitivitySet make_sensitivity_set(Array3D<Cx> maps, std::optional<Array2D<uint8_t>> support = std::nullopt);

struct SosOptions {
  int window_width = 50;        // radial Hanning taper width, oversampled-grid cells
  double mask_threshold = 0.1;  // of max SoS
  int threads = 0;
};

// SoS estimate: raw k-space tapered by a radial Hanning window about DC,
// per-coil low-resolution images via the adjoint NUFFT (density-compensated
// when weights are given), each divided by the root-sum-of-squares image.
// The support mask thresholds the SoS and is morphologically closed.
SensitivitySet estimate_sensitivities_sos(const KSpaceDataset& data, const NufftPlan& plan,
                                          const SosOptions& options, std::span<const double> dcf = {});

// The L2-norm intensity field used for the per-iteration correction.
Array2D<double> intensity_correction_map(const SensitivitySet& sens);

// Noise covariance with its whitening factor W = L^{-1}, W C W^H = I.
struct NoiseModel {
  Array2D<Cx> covariance;
  Array2D<Cx> whitener;  // lower triangular
};

NoiseModel make_noise_model(const Array2D<Cx>& covariance);

// Transforms the coil dimension of samples (and sensitivities when present)
// by the whitener, producing virtual coils with identity noise covariance.
KSpaceDataset prewhiten(const KSpaceDataset& data, const NoiseModel& noise);

}  // namespace cgsense
