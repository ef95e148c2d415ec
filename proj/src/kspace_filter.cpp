#include "cgsense/kspace_filter.hpp"

#include <cmath>

#include "cgsense/errors.hpp"
#include "cgsense/fft.hpp"
#include "cgsense/simd_kernels.hpp"

namespace cgsense {

Array2D<double> filter_weights(const FilterSpec& spec, const GridGeometry& geometry) {
  const int n = geometry.matrix_size;
  if (n < 2) fail_data("filter_weights: missing geometry");
  Array2D<double> w(n, n, 1.0);
  if (spec.kind == FilterSpec::Kind::none) return w;

  double kc = spec.k_c;
  if (spec.unit == FilterSpec::Unit::fraction_half_fov) kc *= n / 2.0;
  if (kc <= 0.0) fail_data("filter_weights: cutoff must be positive");
  if (spec.beta <= 0.0) fail_data("filter_weights: beta must be positive");

  const double c = n / 2.0;
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      const double rad = std::hypot(static_cast<double>(r) - c, static_cast<double>(col) - c);
      if (spec.kind == FilterSpec::Kind::arctan) {
        w(r, col) = 0.5 + std::atan(spec.beta * (kc - rad) / kc) / M_PI;
      } else {
        w(r, col) = rad <= kc ? 1.0 : 0.0;
      }
    }
  }
  return w;
}

Image apply_filter(const Image& image, const FilterSpec& spec, const GridGeometry& geometry) {
  if (spec.kind == FilterSpec::Kind::none) return image;
  if (image.rows() != image.cols()) fail_data("apply_filter: image must be square");
  const Array2D<double> w = filter_weights(spec, geometry);
  if (w.rows() != image.rows()) fail_data("apply_filter: geometry does not match image size");
  Array2D<Cx> k = fft_centered(image);
  kernels::active().rmul(k.data(), w.data(), k.size());
  return ifft_centered(k);
}

}  // namespace cgsense
