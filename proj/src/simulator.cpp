#include "cgsense/simulator.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "cgsense/data_model.hpp"
#include "cgsense/errors.hpp"
#include "cgsense/fft.hpp"
#include "cgsense/linalg.hpp"
#include "cgsense/nufft.hpp"
#include "cgsense/threading.hpp"

namespace cgsense {

PhantomSpec default_shepp_logan(int n) {
  PhantomSpec spec;
  spec.n = n;
  // Modified (Toft) intensities; axes as in the classic table.
  spec.ellipses = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},        {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
      {0.22, 0.0, 0.11, 0.31, -18.0, -0.2},    {-0.22, 0.0, 0.16, 0.41, 18.0, -0.2},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},       {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},     {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
      {0.0, -0.605, 0.023, 0.023, 0.0, 0.1},   {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
  };
  return spec;
}

Image make_phantom(const PhantomSpec& spec) {
  const int n = spec.n;
  if (n < 2) fail_data("make_phantom: matrix size too small");
  Image img(n, n);
  const double half = n / 2.0;
  for (const Ellipse& e : spec.ellipses) {
    const double th = e.angle_deg * M_PI / 180.0;
    const double ct = std::cos(th), st = std::sin(th);
    for (int r = 0; r < n; ++r) {
      // Pixel centers on integer offsets from the grid center (the DC pixel
      // of the centered FFT), expressed in half-FOV units.
      const double y = (static_cast<double>(r) - half) / half;
      for (int c = 0; c < n; ++c) {
        const double x = (static_cast<double>(c) - half) / half;
        const double dx = x - e.cx, dy = y - e.cy;
        const double u = (dx * ct + dy * st) / e.a;
        const double v = (-dx * st + dy * ct) / e.b;
        if (u * u + v * v <= 1.0) img(r, c) += e.intensity;
      }
    }
  }
  for (Cx& v : img.flat()) {
    if (v.real() < -1e-12) fail_data("make_phantom: spec yields negative intensities");
    if (v.real() < 0.0) v = Cx{0.0, 0.0};  // additive rounding dust
  }
  return img;
}

SensitivitySet make_coil_maps(int n, int n_coils, double lobe_sigma) {
  if (n_coils < 1) fail_data("make_coil_maps: need at least one coil");
  if (lobe_sigma <= 0.0) fail_data("make_coil_maps: lobe_sigma must be positive");
  Array3D<Cx> maps(n_coils, n, n);
  const double half = n / 2.0;
  const double ring = 1.2;          // lobe centers sit just outside the FOV
  const double sigma = lobe_sigma;
  for (int c = 0; c < n_coils; ++c) {
    const double phi = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(n_coils);
    const double lx = ring * std::cos(phi), ly = ring * std::sin(phi);
    // Mild linear phase, distinct per coil.
    const double px = 0.35 * std::cos(phi + 0.7), py = 0.35 * std::sin(phi + 0.7);
    for (int r = 0; r < n; ++r) {
      const double y = (static_cast<double>(r) - half) / half;
      for (int col = 0; col < n; ++col) {
        const double x = (static_cast<double>(col) - half) / half;
        const double d2 = (x - lx) * (x - lx) + (y - ly) * (y - ly);
        const double mag = std::exp(-d2 / (2.0 * sigma * sigma));
        const double phase = px * x + py * y;
        maps(c, r, col) = Cx{mag * std::cos(phase), mag * std::sin(phase)};
      }
    }
  }
  return make_sensitivity_set(std::move(maps));
}

Array3D<double> make_radial_trajectory(int n_spokes, int n_read, int n_os, bool alternate_directions,
                                       bool interleaved) {
  if (n_spokes < 1 || n_read < 2 || n_read % 2 != 0) fail_data("make_radial_trajectory: need even n_read >= 2");
  Array3D<double> t(3, n_spokes, n_read);
  const double step = static_cast<double>(n_os) / static_cast<double>(n_read);

  // Golden-stride visit order over the uniform angle fan; coprime stride so
  // every angle appears exactly once.
  int stride = 1;
  if (interleaved && n_spokes > 2) {
    stride = std::max(1, static_cast<int>(std::lround(n_spokes * 0.381966)));
    while (std::gcd(stride, n_spokes) != 1) ++stride;
  }

  for (int s = 0; s < n_spokes; ++s) {
    const int fan_index = static_cast<int>((static_cast<long long>(s) * stride) % n_spokes);
    const double ang = M_PI * static_cast<double>(fan_index) / static_cast<double>(n_spokes);
    const double cx = std::cos(ang), cy = std::sin(ang);
    const bool flip = alternate_directions && (s % 2 == 1);
    for (int r = 0; r < n_read; ++r) {
      const int i = flip ? n_read - 1 - r : r;
      const double rad = (static_cast<double>(i) - n_read / 2.0) * step;
      t(0, s, r) = rad * cx;
      t(1, s, r) = rad * cy;
      t(2, s, r) = 0.0;
    }
  }
  return t;
}

Array3D<double> make_spiral_trajectory(int n_read, double turns, int n_os) {
  if (n_read < 2) fail_data("make_spiral_trajectory: need n_read >= 2");
  Array3D<double> t(3, 1, n_read);
  for (int r = 0; r < n_read; ++r) {
    const double u = static_cast<double>(r) / static_cast<double>(n_read - 1);
    const double rad = 0.5 * static_cast<double>(n_os) * u;
    const double ang = 2.0 * M_PI * turns * u;
    t(0, 0, r) = rad * std::cos(ang);
    t(1, 0, r) = rad * std::sin(ang);
    t(2, 0, r) = 0.0;
  }
  return t;
}

Image disc_bandlimited_reference(const Image& image, double radius_cells) {
  Array2D<Cx> k = fft_centered(image);
  const index_t n = image.rows();
  for (index_t r = 0; r < n; ++r) {
    for (index_t c = 0; c < n; ++c) {
      if (std::hypot(static_cast<double>(r) - n / 2.0, static_cast<double>(c) - n / 2.0) > radius_cells) {
        k(r, c) = Cx{0.0, 0.0};
      }
    }
  }
  return ifft_centered(k);
}

Array2D<Cx> direct_dft(const Image& image, const Array3D<double>& trajectory, double cost_limit, int threads) {
  if (image.rows() != image.cols()) fail_data("direct_dft: image must be square");
  const index_t m = image.rows();
  const index_t ns = trajectory.dim1(), nr = trajectory.dim2();
  const double cost = static_cast<double>(m) * static_cast<double>(m) * static_cast<double>(ns * nr);
  if (cost > cost_limit) {
    fail_data("direct_dft: cost " + std::to_string(cost) + " exceeds limit " + std::to_string(cost_limit));
  }

  Array2D<Cx> out(ns, nr);
  const double scale = 1.0 / static_cast<double>(m);
  const index_t total = ns * nr;
  parallel_for(total, threads, [&](index_t idx) {
    const index_t s = idx / nr, r = idx % nr;
    const double kx = trajectory(0, s, r), ky = trajectory(1, s, r);
    // Separable phase factors: exp(-2*pi*i*k.(p-c)/m) splits into per-axis
    // products, so the inner loop is pure multiply-accumulate.
    std::vector<Cx> ex(static_cast<size_t>(m)), ey(static_cast<size_t>(m));
    for (index_t p = 0; p < m; ++p) {
      const double off = static_cast<double>(p) - static_cast<double>(m / 2);
      const double ax = -2.0 * M_PI * kx * off / static_cast<double>(m);
      const double ay = -2.0 * M_PI * ky * off / static_cast<double>(m);
      ex[static_cast<size_t>(p)] = Cx{std::cos(ax), std::sin(ax)};
      ey[static_cast<size_t>(p)] = Cx{std::cos(ay), std::sin(ay)};
    }
    Cx acc{0.0, 0.0};
    for (index_t y = 0; y < m; ++y) {
      Cx rowacc{0.0, 0.0};
      const Cx* row = image.row(y);
      for (index_t x = 0; x < m; ++x) rowacc += row[x] * ex[static_cast<size_t>(x)];
      acc += rowacc * ey[static_cast<size_t>(y)];
    }
    out(s, r) = acc * scale;
  });
  return out;
}

Simulation simulate_acquisition(const Image& phantom, const SensitivitySet& maps,
                                const Array3D<double>& trajectory,
                                const std::optional<Array2D<Cx>>& noise_covariance, double snr,
                                uint64_t seed, int threads) {
  const index_t n = phantom.rows();
  if (phantom.cols() != n) fail_data("simulate_acquisition: phantom must be square");
  if (maps.n() != n) fail_data("simulate_acquisition: map size disagrees with phantom");
  const index_t nc = maps.n_coils();
  const index_t ns = trajectory.dim1(), nr = trajectory.dim2();

  // The trajectory defines the oversampled FOV; the object lives centered
  // inside it, exactly the support assumption the reconstruction inverts.
  const GridGeometry geom = derive_geometry(trajectory);
  const index_t n_os = geom.grid_size;
  if (n_os < n) fail_data("simulate_acquisition: trajectory extent smaller than phantom");

  Simulation sim;
  sim.phantom = phantom;
  sim.maps = maps;
  sim.data.trajectory = trajectory;
  sim.data.samples = Array3D<Cx>(nc, ns, nr);

  for (index_t c = 0; c < nc; ++c) {
    Image weighted(n, n);
    const Cx* m = maps.maps.slice(c);
    for (index_t i = 0; i < weighted.size(); ++i) weighted.data()[i] = m[i] * phantom.data()[i];
    const Array2D<Cx> padded = pad_center(weighted, n_os);
    const Array2D<Cx> s = direct_dft(padded, trajectory, 6.0e10, threads);
    std::copy(s.data(), s.data() + s.size(), sim.data.samples.slice(c));
  }

  if (snr > 0.0) {
    Array2D<Cx> lower;
    if (noise_covariance) {
      index_t bad = -1;
      if (!linalg::cholesky(*noise_covariance, lower, bad)) {
        fail_numeric("simulate_acquisition: noise covariance not positive definite");
      }
    } else {
      lower = Array2D<Cx>(nc, nc);
      for (index_t i = 0; i < nc; ++i) lower(i, i) = Cx{1.0, 0.0};
    }
    double rms = 0.0;
    for (const Cx& v : sim.data.samples.flat()) rms += std::norm(v);
    rms = std::sqrt(rms / static_cast<double>(sim.data.samples.size()));
    // Zero-signal acquisitions (noise-only scans) take unit reference
    // amplitude so the requested SNR still sets an absolute noise level.
    const double sigma = (rms > 0.0 ? rms : 1.0) / snr;
    sim.noise_sigma = sigma;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));  // unit-variance complex
    std::vector<Cx> white(static_cast<size_t>(nc)), corr(static_cast<size_t>(nc));
    for (index_t s = 0; s < ns; ++s) {
      for (index_t r = 0; r < nr; ++r) {
        for (index_t c = 0; c < nc; ++c) white[static_cast<size_t>(c)] = Cx{gauss(rng), gauss(rng)};
        for (index_t c = 0; c < nc; ++c) {
          Cx acc{0.0, 0.0};
          for (index_t k = 0; k <= c; ++k) acc += lower(c, k) * white[static_cast<size_t>(k)];
          corr[static_cast<size_t>(c)] = acc;
        }
        for (index_t c = 0; c < nc; ++c) sim.data.samples(c, s, r) += sigma * corr[static_cast<size_t>(c)];
      }
    }
    if (noise_covariance) {
      Array2D<Cx> cov = *noise_covariance;
      for (Cx& v : cov.flat()) v *= sigma * sigma;
      sim.data.noise_covariance = std::move(cov);
    }
  }

  sim.data.sensitivities = maps.maps;
  return sim;
}

}  // namespace cgsense
