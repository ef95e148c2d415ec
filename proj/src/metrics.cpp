#include "cgsense/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cgsense/errors.hpp"

namespace cgsense {
namespace {

Array2D<double> magnitude(const Image& img) {
  Array2D<double> m(img.rows(), img.cols());
  for (index_t i = 0; i < img.size(); ++i) m.data()[i] = std::abs(img.data()[i]);
  return m;
}

template <class T>
Array2D<T> crop2d(const Array2D<T>& a, index_t n) {
  const index_t r0 = (a.rows() - n) / 2, c0 = (a.cols() - n) / 2;
  Array2D<T> out(n, n);
  for (index_t r = 0; r < n; ++r) {
    const T* src = a.row(r0 + r) + c0;
    std::copy(src, src + n, out.row(r));
  }
  return out;
}

// Separable Gaussian blur with reflected borders.
Array2D<double> gaussian_blur(const Array2D<double>& in, int window, double sigma) {
  const int half = window / 2;
  std::vector<double> g(static_cast<size_t>(window));
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - half;
    g[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += g[static_cast<size_t>(i)];
  }
  for (double& v : g) v /= sum;

  const index_t n = in.rows(), m = in.cols();
  auto reflect = [](index_t i, index_t len) {
    if (i < 0) return -i - 1;
    if (i >= len) return 2 * len - i - 1;
    return i;
  };
  Array2D<double> tmp(n, m), out(n, m);
  for (index_t r = 0; r < n; ++r) {
    for (index_t c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int k = 0; k < window; ++k) acc += g[static_cast<size_t>(k)] * in(r, reflect(c + k - half, m));
      tmp(r, c) = acc;
    }
  }
  for (index_t r = 0; r < n; ++r) {
    for (index_t c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int k = 0; k < window; ++k) acc += g[static_cast<size_t>(k)] * tmp(reflect(r + k - half, n), c);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

double magnitude_quantile(const Image& img, double q) {
  if (img.empty()) fail_data("magnitude_quantile: empty image");
  if (q < 0.0 || q > 1.0) fail_data("magnitude_quantile: q must lie in [0, 1]");
  std::vector<double> mags(static_cast<size_t>(img.size()));
  for (index_t i = 0; i < img.size(); ++i) mags[static_cast<size_t>(i)] = std::abs(img.data()[i]);
  std::sort(mags.begin(), mags.end());
  const double pos = q * static_cast<double>(mags.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  const double hi = lo + 1 < mags.size() ? mags[lo + 1] : mags[lo];
  return mags[lo] + frac * (hi - mags[lo]);
}

Image quantile_normalize(const Image& img, double q) {
  const double scale = magnitude_quantile(img, q);
  if (scale <= 0.0) fail_data("quantile_normalize: quantile is zero");
  Image out = img;
  for (Cx& v : out.flat()) v /= scale;
  return out;
}

double nrmse(const Image& x, const Image& ref, const Array2D<uint8_t>& mask) {
  if (!x.same_shape(ref) || !mask.same_shape(x)) fail_data("nrmse: shape mismatch");
  double se = 0.0, refsum = 0.0;
  index_t count = 0;
  for (index_t i = 0; i < x.size(); ++i) {
    if (!mask.data()[i]) continue;
    const double d = std::abs(x.data()[i]) - std::abs(ref.data()[i]);
    se += d * d;
    refsum += std::abs(ref.data()[i]);
    ++count;
  }
  if (count == 0) fail_data("nrmse: empty mask");
  const double ref_mean = refsum / static_cast<double>(count);
  if (ref_mean <= 0.0) fail_data("nrmse: reference has zero mean magnitude");
  return std::sqrt(se / static_cast<double>(count)) / ref_mean;
}

double ssim(const Image& x, const Image& ref, const Array2D<uint8_t>& mask, const SsimOptions& options) {
  if (!x.same_shape(ref) || !mask.same_shape(x)) fail_data("ssim: shape mismatch");
  if (static_cast<index_t>(options.window) > x.rows() || static_cast<index_t>(options.window) > x.cols()) {
    fail_data("ssim: window larger than image");
  }
  const Array2D<double> a = magnitude(x), b = magnitude(ref);
  Array2D<double> a2(a.rows(), a.cols()), b2(a.rows(), a.cols()), ab(a.rows(), a.cols());
  for (index_t i = 0; i < a.size(); ++i) {
    a2.data()[i] = a.data()[i] * a.data()[i];
    b2.data()[i] = b.data()[i] * b.data()[i];
    ab.data()[i] = a.data()[i] * b.data()[i];
  }
  const auto mu_a = gaussian_blur(a, options.window, options.sigma);
  const auto mu_b = gaussian_blur(b, options.window, options.sigma);
  const auto m_a2 = gaussian_blur(a2, options.window, options.sigma);
  const auto m_b2 = gaussian_blur(b2, options.window, options.sigma);
  const auto m_ab = gaussian_blur(ab, options.window, options.sigma);

  const double c1 = options.k1 * options.dynamic_range * options.k1 * options.dynamic_range;
  const double c2 = options.k2 * options.dynamic_range * options.k2 * options.dynamic_range;
  double acc = 0.0;
  index_t count = 0;
  for (index_t i = 0; i < a.size(); ++i) {
    if (!mask.data()[i]) continue;
    const double ma = mu_a.data()[i], mb = mu_b.data()[i];
    const double va = m_a2.data()[i] - ma * ma;
    const double vb = m_b2.data()[i] - mb * mb;
    const double cov = m_ab.data()[i] - ma * mb;
    acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    ++count;
  }
  if (count == 0) fail_data("ssim: empty mask");
  return acc / static_cast<double>(count);
}

Array2D<double> diff_map(const Image& x, const Image& ref, double q) {
  const Image xn = quantile_normalize(x, q);
  const Image rn = quantile_normalize(ref, q);
  const index_t n = std::min(std::min(xn.rows(), xn.cols()), std::min(rn.rows(), rn.cols()));
  const Image xc = crop2d(xn, n), rc = crop2d(rn, n);
  if (!xc.same_shape(rc)) {
    fail_data("diff_map: incompatible shapes after cropping: " + std::to_string(xc.rows()) + "x" +
              std::to_string(xc.cols()) + " vs " + std::to_string(rc.rows()) + "x" + std::to_string(rc.cols()));
  }
  Array2D<double> d(n, n);
  for (index_t i = 0; i < d.size(); ++i) {
    d.data()[i] = std::abs(xc.data()[i]) - std::abs(rc.data()[i]);
  }
  return d;
}

ComparisonReport compare_images(const Image& x, const Image& ref, std::optional<Array2D<uint8_t>> mask, double q) {
  const Image xn = quantile_normalize(x, q);
  const Image rn = quantile_normalize(ref, q);
  const index_t n = std::min(std::min(xn.rows(), xn.cols()), std::min(rn.rows(), rn.cols()));
  const Image xc = crop2d(xn, n), rc = crop2d(rn, n);

  ComparisonReport rep;
  rep.normalization_quantile = q;
  rep.compared_size = n;
  if (mask && (mask->rows() < n || mask->cols() < n)) fail_data("compare_images: mask smaller than compared FOV");
  rep.mask_used = mask ? crop2d(*mask, n) : full_mask(n, n);
  rep.nrmse = nrmse(xc, rc, rep.mask_used);
  rep.ssim = ssim(xc, rc, rep.mask_used);
  rep.diff_map = Array2D<double>(n, n);
  for (index_t i = 0; i < rep.diff_map.size(); ++i) {
    rep.diff_map.data()[i] = std::abs(xc.data()[i]) - std::abs(rc.data()[i]);
  }
  return rep;
}

Array2D<uint8_t> full_mask(index_t rows, index_t cols) { return Array2D<uint8_t>(rows, cols, 1); }

}  // namespace cgsense
