#include "cgsense/coils.hpp"

#include <cmath>

#include "cgsense/errors.hpp"
#include "cgsense/linalg.hpp"
#include "cgsense/threading.hpp"

namespace cgsense {
namespace {

Array2D<double> sos_field(const Array3D<Cx>& maps) {
  Array2D<double> out(maps.dim1(), maps.dim2());
  for (index_t c = 0; c < maps.dim0(); ++c) {
    const Cx* m = maps.slice(c);
    for (index_t i = 0; i < out.size(); ++i) out.data()[i] += std::norm(m[i]);
  }
  for (double& v : out.flat()) v = std::sqrt(v);
  return out;
}

// 3x3 dilation followed by erosion; fills pinholes the SoS threshold leaves
// inside tissue.
Array2D<uint8_t> morph_close(const Array2D<uint8_t>& m) {
  const index_t n = m.rows(), cgs = m.cols();
  auto sweep = [&](const Array2D<uint8_t>& in, uint8_t grow) {
    Array2D<uint8_t> out(n, cgs);
    for (index_t r = 0; r < n; ++r) {
      for (index_t c = 0; c < cgs; ++c) {
        uint8_t v = grow ? 0 : 1;
        for (index_t dr = -1; dr <= 1; ++dr) {
          for (index_t dc = -1; dc <= 1; ++dc) {
            const index_t rr = r + dr, cc = c + dc;
            uint8_t cell = 0;
            if (rr >= 0 && rr < n && cc >= 0 && cc < cgs) cell = in(rr, cc);
            else cell = grow ? 0 : 1;  // stay neutral at borders
            if (grow) v |= cell;
            else v &= cell;
          }
        }
        out(r, c) = v;
      }
    }
    return out;
  };
  return sweep(sweep(m, 1), 0);
}

}  // namespace

SensitivitySet make_sensitivity_set(Array3D<Cx> maps, std::optional<Array2D<uint8_t>> support) {
  SensitivitySet s;
  s.maps = std::move(maps);
  s.intensity = sos_field(s.maps);
  if (support) {
    s.support = std::move(*support);
    if (!s.support.same_shape(s.intensity)) fail_data("make_sensitivity_set: mask shape mismatch");
  } else {
    s.support = Array2D<uint8_t>(s.intensity.rows(), s.intensity.cols());
    for (index_t i = 0; i < s.intensity.size(); ++i) s.support.data()[i] = s.intensity.data()[i] > 0.0;
  }
  return s;
}

SensitivitySet estimate_sensitivities_sos(const KSpaceDataset& data, const NufftPlan& plan,
                                          const SosOptions& options, std::span<const double> dcf) {
  const index_t nc = data.n_coils(), ns = data.n_spokes(), nr = data.n_read();
  if (nc < 1) fail_data("estimate_sensitivities_sos: dataset has no coils");
  double energy = 0.0;
  for (const Cx& v : data.samples.flat()) energy += std::norm(v);
  if (energy <= 0.0) fail_data("estimate_sensitivities_sos: all-zero data");

  // Radial Hanning taper of total width window_width grid cells about DC.
  const double half_w = options.window_width / 2.0;
  Array2D<double> taper(ns, nr);
  for (index_t s = 0; s < ns; ++s) {
    for (index_t r = 0; r < nr; ++r) {
      const double rad = std::hypot(data.trajectory(0, s, r), data.trajectory(1, s, r));
      taper(s, r) = rad <= half_w ? 0.5 * (1.0 + std::cos(M_PI * rad / half_w)) : 0.0;
    }
  }

  const int n = plan.matrix_size();
  Array3D<Cx> imgs(nc, n, n);
  parallel_for(nc, options.threads, [&](index_t c) {
    Array2D<Cx> tapered(ns, nr);
    for (index_t i = 0; i < tapered.size(); ++i) {
      tapered.data()[i] = data.samples.slice(c)[i] * taper.data()[i];
    }
    NufftImage low = nufft_adjoint(plan, data.trajectory, tapered, dcf);
    std::copy(low.image.data(), low.image.data() + low.image.size(), imgs.slice(c));
  });

  Array2D<double> sos = sos_field(imgs);
  double sos_max = 0.0;
  for (double v : sos.flat()) sos_max = std::max(sos_max, v);
  if (sos_max <= 0.0) fail_numeric("estimate_sensitivities_sos: zero SoS image");

  Array2D<uint8_t> mask(n, n);
  for (index_t i = 0; i < sos.size(); ++i) mask.data()[i] = sos.data()[i] > options.mask_threshold * sos_max;
  mask = morph_close(mask);

  Array3D<Cx> maps(nc, n, n);
  for (index_t c = 0; c < nc; ++c) {
    for (index_t i = 0; i < sos.size(); ++i) {
      maps.slice(c)[i] = mask.data()[i] ? imgs.slice(c)[i] / sos.data()[i] : Cx{0.0, 0.0};
    }
  }
  return make_sensitivity_set(std::move(maps), std::move(mask));
}

Array2D<double> intensity_correction_map(const SensitivitySet& sens) { return sens.intensity; }

NoiseModel make_noise_model(const Array2D<Cx>& covariance) {
  NoiseModel m;
  m.covariance = covariance;
  Array2D<Cx> lower;
  index_t bad = -1;
  if (!linalg::cholesky(covariance, lower, bad)) {
    const auto ev = linalg::hermitian_eigenvalues(covariance);
    fail_numeric("noise covariance is not positive definite: smallest eigenvalue " +
                 std::to_string(ev.empty() ? 0.0 : ev.front()) + " (pivot " + std::to_string(bad) + ")");
  }
  m.whitener = linalg::invert_lower(lower);

  // W C W^H must be the identity to 1e-10.
  Array2D<Cx> check = linalg::matmul(linalg::matmul(m.whitener, covariance), linalg::adjoint(m.whitener));
  for (index_t i = 0; i < check.rows(); ++i) {
    for (index_t j = 0; j < check.cols(); ++j) {
      const Cx want = i == j ? Cx{1.0, 0.0} : Cx{0.0, 0.0};
      if (std::abs(check(i, j) - want) > 1e-10) fail_numeric("noise whitener failed its identity check");
    }
  }
  return m;
}

KSpaceDataset prewhiten(const KSpaceDataset& data, const NoiseModel& noise) {
  const index_t nc = data.n_coils();
  if (noise.whitener.rows() != nc) fail_data("prewhiten: covariance coil count mismatch");

  KSpaceDataset out;
  out.trajectory = data.trajectory;
  out.samples = Array3D<Cx>(nc, data.n_spokes(), data.n_read());
  const index_t nk = data.n_spokes() * data.n_read();
  for (index_t c = 0; c < nc; ++c) {
    Cx* dst = out.samples.slice(c);
    for (index_t c2 = 0; c2 <= c; ++c2) {
      const Cx w = noise.whitener(c, c2);
      if (w == Cx{}) continue;
      const Cx* src = data.samples.slice(c2);
      for (index_t i = 0; i < nk; ++i) dst[i] += w * src[i];
    }
  }
  if (data.sensitivities) {
    const auto& sin = *data.sensitivities;
    Array3D<Cx> sout(nc, sin.dim1(), sin.dim2());
    const index_t np = sin.dim1() * sin.dim2();
    for (index_t c = 0; c < nc; ++c) {
      Cx* dst = sout.slice(c);
      for (index_t c2 = 0; c2 <= c; ++c2) {
        const Cx w = noise.whitener(c, c2);
        if (w == Cx{}) continue;
        const Cx* src = sin.slice(c2);
        for (index_t i = 0; i < np; ++i) dst[i] += w * src[i];
      }
    }
    out.sensitivities = std::move(sout);
  }
  // Virtual coils now carry identity covariance.
  Array2D<Cx> eye(nc, nc);
  for (index_t i = 0; i < nc; ++i) eye(i, i) = Cx{1.0, 0.0};
  out.noise_covariance = std::move(eye);
  out.whitened = true;
  return out;
}

}  // namespace cgsense
