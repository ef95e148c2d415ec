#pragma once

#include <optional>

#include "cgsense/coils.hpp"
#include "cgsense/types.hpp"

namespace cgsense {

// Ground-truth generators for desk-scale verification: piecewise-constant
// ellipse phantoms, smooth synthetic coil profiles, radial/spiral
// trajectories, a brute-force DFT, and the acquisition simulator that feeds
// the end-to-end tests.

struct Ellipse {
  double cx = 0.0, cy = 0.0;     // center, half-FOV units ([-1, 1] spans the FOV)
  double a = 0.5, b = 0.5;       // semi-axes, half-FOV units
  double angle_deg = 0.0;        // counter-clockwise rotation
  double intensity = 1.0;        // additive
};

struct PhantomSpec {
  int n = 64;
  std::vector<Ellipse> ellipses;
};

// The usual modified Shepp-Logan head phantom (bright shell, additive
// interior structures, nonnegative everywhere).
PhantomSpec default_shepp_logan(int n);

Image make_phantom(const PhantomSpec& spec);

// Gaussian-lobe coil profiles centered on a ring just outside the FOV with a
// smooth per-coil phase; the SoS intensity is strictly positive over the FOV.
// lobe_sigma (half-FOV units) trades coil diversity against smoothness.
SensitivitySet make_coil_maps(int n, int n_coils, double lobe_sigma = 0.9);

// Uniform radial spokes over pi; readout spans [-n_os/2, n_os/2) in
// oversampled-grid units. alternate_directions reverses every odd spoke in
// acquisition order. interleaved visits the uniform angle set with a
// golden-stride permutation, the usual acquisition ordering that keeps any
// leading subset of spokes (first-p undersampling) angularly quasi-uniform;
// pass false for the sequential fan.
Array3D<double> make_radial_trajectory(int n_spokes, int n_read, int n_os, bool alternate_directions = false,
                                       bool interleaved = true);

// Archimedean spiral, smoke tests only.
Array3D<double> make_spiral_trajectory(int n_read, double turns, int n_os);

// Projection of an image onto the disc-limited k-space a radial acquisition
// of the given radius (image-kspace cells) can represent: the recovery target
// for end-to-end tests. A piecewise-constant raster keeps corner frequencies
// no radial trajectory measures, so comparing against the raw raster has a
// representation-error floor regardless of reconstruction quality.
Image disc_bandlimited_reference(const Image& image, double radius_cells);

// Brute-force non-uniform DFT of an m x m image:
//   s_i = (1/m) * sum_p image[p] * exp(-2*pi*i * k_i . (p - m/2) / m)
// with the trajectory interpreted on the image's own grid. Matches
// fft_centered on integer grid nodes. Guarded by a cost limit
// (m^2 * n_k pixel-sample products).
Array2D<Cx> direct_dft(const Image& image, const Array3D<double>& trajectory,
                       double cost_limit = 4.0e9, int threads = 0);

struct Simulation {
  KSpaceDataset data;
  Image phantom;          // ground truth, n x n
  SensitivitySet maps;    // ground truth
  double noise_sigma = 0.0;
};

// Per coil: direct DFT of maps[c]*phantom embedded centered in the
// oversampled FOV the trajectory spans, plus optional correlated Gaussian
// noise (covariance factored through its Cholesky factor) scaled so that
// rms(signal)/sigma = snr. snr <= 0 means noiseless.
Simulation simulate_acquisition(const Image& phantom, const SensitivitySet& maps,
                                const Array3D<double>& trajectory,
                                const std::optional<Array2D<Cx>>& noise_covariance = std::nullopt,
                                double snr = 0.0, uint64_t seed = 1234, int threads = 0);

}  // namespace cgsense
