#pragma once

#include "cgsense/gridding.hpp"

namespace cgsense {

// Immutable bundle of everything the NUFFT pair needs; build once, share
// across threads.
struct NufftPlan {
  GridGeometry geometry;
  GriddingKernel kernel;
  Apodization apodization;
  Array2D<double> deapodize;  // reciprocal of apodization.map over the grid

  int matrix_size() const { return geometry.matrix_size; }
  int grid_size() const { return geometry.grid_size; }
};

NufftPlan make_nufft_plan(const GridGeometry& geometry, int kernel_width = 5, int kernel_table_points = 10000,
                          GriddingKernel::Lookup lookup = GriddingKernel::Lookup::linear);

// Symmetric center crop / zero-pad between the target and oversampled FOV.
Array2D<Cx> crop_center(const Array2D<Cx>& img, index_t n);
Array2D<Cx> pad_center(const Array2D<Cx>& img, index_t n);

struct NufftImage {
  Image image;
  index_t dropped = 0;
  index_t total = 0;
};

struct NufftSamples {
  Array2D<Cx> samples;  // [spoke][read]
  index_t dropped = 0;
  index_t total = 0;
};

// Adjoint NUFFT for one coil: optional density weighting, gridding, centered
// inverse FFT, deapodization on the oversampled grid, symmetric FOV crop.
NufftImage nufft_adjoint(const NufftPlan& plan, const Array3D<double>& trajectory, const Array2D<Cx>& samples,
                         std::span<const double> weights = {});

// Forward NUFFT for one coil: zero-pad, deapodize, centered FFT, degridding,
// optional density weighting. Exact adjoint of nufft_adjoint when both sides
// carry the same weights (sqrt of the DCF in the CG operator).
NufftSamples nufft_forward(const NufftPlan& plan, const Array3D<double>& trajectory, const Image& image,
                           std::span<const double> weights = {});

}  // namespace cgsense
