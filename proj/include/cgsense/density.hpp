#pragma once

#include "cgsense/gridding.hpp"

namespace cgsense {

// Per-sample density compensation weights, max-normalized to 1.
struct DensityWeights {
  Array2D<double> weights;  // [spoke][read], in [0, 1]
  std::span<const double> flat() const { return weights.flat(); }
};

// Jackson-style estimate: grid a k-space of ones, read the density back at
// each sample location with the same kernel, invert with a relative floor.
DensityWeights dcf_gridded_ones(const Array3D<double>& trajectory, const GriddingKernel& kernel,
                                const GridGeometry& geometry);

// Simple ramp: Euclidean norm of each trajectory position over its maximum.
// Exact-zero (DC) samples take the smallest positive weight on their spoke so
// the sample is not discarded.
DensityWeights dcf_ramp(const Array3D<double>& trajectory);

}  // namespace cgsense
