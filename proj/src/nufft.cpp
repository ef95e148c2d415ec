#include "cgsense/nufft.hpp"

#include "cgsense/errors.hpp"
#include "cgsense/fft.hpp"
#include "cgsense/simd_kernels.hpp"

namespace cgsense {

NufftPlan make_nufft_plan(const GridGeometry& geometry, int kernel_width, int kernel_table_points,
                          GriddingKernel::Lookup lookup) {
  NufftPlan p;
  p.geometry = geometry;
  p.kernel = build_kernel(kernel_width, kernel_table_points, geometry.oversampling_ratio, lookup);
  p.apodization = compute_apodization(p.kernel, geometry);

  // Gridding multiplies the image by the unnormalized discrete roll-off
  // D(x)*D(y), D(x) = sum_d kernel(|d|) * exp(2*pi*i*(x-c)*d/n_os). The
  // deconvolution divides by exactly that; the normalized apodization map is
  // the same profile scaled to peak 1.
  const int n_os = geometry.grid_size;
  double d0 = 0.0;  // D(0): total 1D kernel mass at integer offsets
  const int hw = p.kernel.width / 2;
  for (int d = -hw; d <= hw; ++d) d0 += p.kernel.at(std::abs(static_cast<double>(d)));

  p.deapodize = Array2D<double>(n_os, n_os);
  for (int r = 0; r < n_os; ++r) {
    for (int c = 0; c < n_os; ++c) {
      const double v = p.apodization.axis[static_cast<size_t>(r)] * p.apodization.axis[static_cast<size_t>(c)] *
                       d0 * d0;
      p.deapodize(r, c) = v > 1e-12 ? 1.0 / v : 0.0;
    }
  }
  return p;
}

Array2D<Cx> crop_center(const Array2D<Cx>& img, index_t n) {
  if (n > img.rows() || n > img.cols()) fail_data("crop_center: target larger than source");
  const index_t r0 = (img.rows() - n) / 2;
  const index_t c0 = (img.cols() - n) / 2;
  Array2D<Cx> out(n, n);
  for (index_t r = 0; r < n; ++r) {
    const Cx* src = img.row(r0 + r) + c0;
    std::copy(src, src + n, out.row(r));
  }
  return out;
}

Array2D<Cx> pad_center(const Array2D<Cx>& img, index_t n) {
  if (n < img.rows() || n < img.cols()) fail_data("pad_center: target smaller than source");
  const index_t r0 = (n - img.rows()) / 2;
  const index_t c0 = (n - img.cols()) / 2;
  Array2D<Cx> out(n, n);
  for (index_t r = 0; r < img.rows(); ++r) {
    std::copy(img.row(r), img.row(r) + img.cols(), out.row(r0 + r) + c0);
  }
  return out;
}

NufftImage nufft_adjoint(const NufftPlan& plan, const Array3D<double>& trajectory, const Array2D<Cx>& samples,
                         std::span<const double> weights) {
  GridResult gr = grid_adjoint(samples, trajectory, plan.kernel, plan.geometry, weights);
  Array2D<Cx> img_os = ifft_centered(gr.grid);
  kernels::active().rmul(img_os.data(), plan.deapodize.data(), img_os.size());
  NufftImage out;
  out.image = crop_center(img_os, plan.matrix_size());
  out.dropped = gr.dropped;
  out.total = gr.total;
  return out;
}

NufftSamples nufft_forward(const NufftPlan& plan, const Array3D<double>& trajectory, const Image& image,
                           std::span<const double> weights) {
  if (image.rows() != plan.matrix_size() || image.cols() != plan.matrix_size()) {
    fail_data("nufft_forward: image must match the target matrix size");
  }
  Array2D<Cx> img_os = pad_center(image, plan.grid_size());
  kernels::active().rmul(img_os.data(), plan.deapodize.data(), img_os.size());
  Array2D<Cx> kspace = fft_centered(img_os);
  DegridResult dg = degrid_forward(kspace, trajectory, plan.kernel, plan.geometry, weights);
  NufftSamples out;
  out.samples = std::move(dg.samples);
  out.dropped = dg.dropped;
  out.total = dg.total;
  return out;
}

}  // namespace cgsense
