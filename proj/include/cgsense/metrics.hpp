#pragma once

#include "cgsense/types.hpp"

namespace cgsense {

// Comparison protocol: magnitudes, 0.95-quantile normalization, symmetric
// center cropping to a common FOV, masked NRMSE and SSIM.

// Quantile of the pixel magnitudes (linearly interpolated order statistic).
double magnitude_quantile(const Image& img, double q);

// Divides by the q-quantile of |pixels|; afterwards that quantile is 1.
Image quantile_normalize(const Image& img, double q = 0.95);

// sqrt(mean over mask of (|x|-|ref|)^2) / (mean over mask of |ref|).
double nrmse(const Image& x, const Image& ref, const Array2D<uint8_t>& mask);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01, k2 = 0.03;
  double dynamic_range = 1.0;  // inputs normalized to ~[0, 1]; overshoot allowed
};

// Mean local SSIM of the magnitude images over the mask (Wang et al. 2004
// parameters: 11x11 Gaussian window, sigma 1.5, K1 = 0.01, K2 = 0.03).
double ssim(const Image& x, const Image& ref, const Array2D<uint8_t>& mask, const SsimOptions& options = {});

struct ComparisonReport {
  double nrmse = 0.0;
  double ssim = 0.0;
  Array2D<double> diff_map;     // |norm(x)| - |norm(ref)| after cropping
  Array2D<uint8_t> mask_used;
  double normalization_quantile = 0.95;
  index_t compared_size = 0;
};

// Signed pixel-wise difference of the quantile-normalized magnitudes after
// symmetric center cropping to the smaller FOV.
Array2D<double> diff_map(const Image& x, const Image& ref, double q = 0.95);

// Full protocol: normalize, crop, metrics, difference map. The optional mask
// is cropped alongside; without one, every pixel counts.
ComparisonReport compare_images(const Image& x, const Image& ref,
                                std::optional<Array2D<uint8_t>> mask = std::nullopt, double q = 0.95);

Array2D<uint8_t> full_mask(index_t rows, index_t cols);

}  // namespace cgsense
