// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exits nonzero if any required criterion fails. The optional challenge-data
// integration (criterion 11) runs only when CGSENSE_CHALLENGE_BRAIN points at
// the file and reports SKIP otherwise.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "cgsense/cg.hpp"
#include "cgsense/data_model.hpp"
#include "cgsense/fft.hpp"
#include "cgsense/io_container.hpp"
#include "cgsense/kspace_filter.hpp"
#include "cgsense/linalg.hpp"
#include "cgsense/metrics.hpp"
#include "cgsense/simd_kernels.hpp"
#include "cgsense/simulator.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cgsense;

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridGeometry geometry(int n, double ratio = 2.0) {
  return {n, static_cast<int>(std::lround(n * ratio)), ratio, 1.0 / std::lround(n * ratio)};
}

Array3D<double> random_points(int count, int n_os, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Array3D<double> t(3, 1, count);
  const double rmax = n_os / 2.0 - 3.0;
  int placed = 0;
  while (placed < count) {
    const double x = u(rng) * rmax, y = u(rng) * rmax;
    if (x * x + y * y > rmax * rmax) continue;
    t(0, 0, placed) = x;
    t(1, 0, placed) = y;
    ++placed;
  }
  return t;
}

// ---- C1: NUFFT oracle equivalence -----------------------------------------

double forward_error(int width) {
  const GridGeometry g = geometry(16, 2.0);
  const NufftPlan plan = make_nufft_plan(g, width, 10000);
  const Array3D<double> traj = random_points(64, g.grid_size, 424242);
  const Image img = oracles::random_cx_image(16, 77);
  const NufftSamples got = nufft_forward(plan, traj, img);
  const Array2D<Cx> want = direct_dft(pad_center(img, g.grid_size), traj);
  return oracles::rel_l2_error(got.samples.flat(), want.flat());
}

Outcome c1_nufft_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const double err5 = forward_error(5);
  const double elapsed = seconds_since(t0);
  double prev = 1e9;
  bool monotone = true;
  std::ostringstream widths;
  for (int w : {2, 3, 4, 5, 6}) {
    const double e = forward_error(w);
    widths << " w" << w << "=" << e;
    if (e >= prev) monotone = false;
    prev = e;
  }
  std::ostringstream d;
  d << "rel l2 err (w5) = " << err5 << ", runtime " << elapsed << " s, widths:" << widths.str();
  return {err5 < 1e-3 && elapsed < 1.0 && monotone, false, d.str()};
}

// ---- C2: adjointness -------------------------------------------------------

Outcome c2_adjointness() {
  const int n = 64;
  const auto traj = make_radial_trajectory(101, 2 * n, 2 * n);
  const NufftPlan plan = make_nufft_plan(derive_geometry(traj, 2.0));
  const SensitivitySet maps = make_coil_maps(n, 4);
  const DensityWeights dcf = dcf_gridded_ones(traj, plan.kernel, plan.geometry);
  const EncodingOperator op = make_encoding_operator(plan, traj, maps, dcf);

  std::mt19937_64 rng(3141);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Image x = oracles::random_cx_image(n, 900 + static_cast<uint64_t>(rep));
    Array3D<Cx> y(op.n_coils(), traj.dim1(), traj.dim2());
    for (auto& v : y.flat()) v = Cx{gauss(rng), gauss(rng)};
    const Array3D<Cx> ex = apply_forward(op, x);
    const Image ehy = apply_adjoint(op, y);
    const Cx lhs = oracles::inner(std::span<const Cx>(ex.data(), static_cast<size_t>(ex.size())),
                                  std::span<const Cx>(y.data(), static_cast<size_t>(y.size())));
    const Cx rhs = oracles::inner(x.flat(), ehy.flat());
    const double denom = oracles::l2(std::span<const Cx>(ex.data(), static_cast<size_t>(ex.size()))) *
                         oracles::l2(std::span<const Cx>(y.data(), static_cast<size_t>(y.size())));
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  std::ostringstream d;
  d << "worst relative adjointness defect over 20 pairs = " << worst;
  return {worst < 1e-10, false, d.str()};
}

// ---- C3: CG vs dense solve -------------------------------------------------

Outcome c3_cg_dense() {
  const index_t n = 32;
  const Array2D<Cx> a = oracles::random_hpd(n, 2718, 1.0);
  const auto b = oracles::random_cx_vector(static_cast<size_t>(n), 999);
  auto normal = [&a](const std::vector<Cx>& x) {
    std::vector<Cx> y(x.size());
    for (index_t i = 0; i < a.rows(); ++i) {
      Cx acc{0.0, 0.0};
      for (index_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[static_cast<size_t>(j)];
      y[static_cast<size_t>(i)] = acc;
    }
    return y;
  };
  const CgOutcome out = cg_solve_operator(normal, b, 32, 0.0);
  const auto want = oracles::dense_solve(a, b);
  const double err = oracles::rel_l2_error(out.solution, want);
  bool monotone = true;
  for (size_t i = 1; i < out.residual_history.size(); ++i) {
    if (out.residual_history[i] > out.residual_history[i - 1] * (1.0 + 1e-6)) monotone = false;
  }
  std::ostringstream d;
  d << "rel err vs dense solve = " << err << " in " << out.iterations_run
    << " iterations, residual history monotone = " << (monotone ? "yes" : "no");
  return {err < 1e-8 && out.iterations_run <= 32 && monotone, false, d.str()};
}

// ---- C4: end-to-end recovery ------------------------------------------------

Outcome c4_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 64;
  const Image phantom = make_phantom(default_shepp_logan(n));
  const SensitivitySet maps = make_coil_maps(n, 8);
  const auto traj = make_radial_trajectory(101, 2 * n, 2 * n);
  const Simulation sim = simulate_acquisition(phantom, maps, traj);

  // Recovery target: the phantom projected onto the disc-supported k-space
  // the radial acquisition can represent (see notes in the simulator header).
  const Image ref = disc_bandlimited_reference(phantom, n / 2.0);
  Array2D<uint8_t> mask(n, n);
  for (index_t i = 0; i < mask.size(); ++i) mask.data()[i] = std::abs(phantom.data()[i]) > 1e-6;

  ReconOptions opt;  // consolidated defaults: 10 iterations, lambda = 0
  opt.oversampling_ratio_override = 2.0;
  const ReconRun full = reconstruct(sim.data, opt);
  const double err1 = nrmse(full.result.final_image, ref, mask);

  const KSpaceDataset half = undersample(sim.data, UndersampleScheme::first_p_spokes, 50);
  const ReconRun r2 = reconstruct(half, opt);
  const double err2 = nrmse(r2.result.final_image, ref, mask);
  const double elapsed = seconds_since(t0);

  std::ostringstream d;
  d << "masked NRMSE R=1: " << err1 << " (< 0.05), R=2: " << err2 << " (< 0.10), runtime " << elapsed << " s";
  return {err1 < 0.05 && err2 < 0.10 && elapsed < 30.0, false, d.str()};
}

// ---- C5: regularization behavior --------------------------------------------

Outcome c5_regularization() {
  // Bitwise: lambda = 0 must equal a path with no regularization term at all.
  const int n = 32;
  const Image phantom = make_phantom(default_shepp_logan(n));
  const SensitivitySet maps = make_coil_maps(n, 4);
  const auto traj = make_radial_trajectory(51, 2 * n, 2 * n);
  const Simulation sim = simulate_acquisition(phantom, maps, traj);
  const NufftPlan plan = make_nufft_plan(derive_geometry(traj, 2.0));
  const DensityWeights dcf = dcf_gridded_ones(traj, plan.kernel, plan.geometry);
  const EncodingOperator op = make_encoding_operator(plan, traj, maps, dcf, 0.0);

  CgConfig cfg;
  cfg.check_operator = false;
  const ReconResult with_zero = cg_solve(op, sim.data.samples, cfg);

  // Regularization-free replica of the same normal operator.
  Array3D<Cx> weighted = sim.data.samples;
  for (index_t c = 0; c < weighted.dim0(); ++c) {
    kernels::active().rmul(weighted.slice(c), op.sqrt_dcf.data(), op.sqrt_dcf.size());
  }
  Image b = apply_adjoint(op, weighted);
  kernels::active().rmul(b.data(), op.intensity_recip.data(), b.size());
  auto normal = [&op, n](const std::vector<Cx>& xv) {
    Image x(n, n);
    std::copy(xv.begin(), xv.end(), x.data());
    Image px = x;
    kernels::active().rmul(px.data(), op.intensity_recip.data(), px.size());
    Image y = apply_adjoint(op, apply_forward(op, px));
    kernels::active().rmul(y.data(), op.intensity_recip.data(), y.size());
    return std::vector<Cx>(y.data(), y.data() + y.size());
  };
  const CgOutcome bare = cg_solve_operator(normal, std::vector<Cx>(b.data(), b.data() + b.size()), 10, 0.0);
  Image vk(n, n);
  std::copy(bare.solution.begin(), bare.solution.end(), vk.data());
  kernels::active().rmul(vk.data(), op.intensity_recip.data(), vk.size());

  bool bitwise = true;
  Image corrected = with_zero.final_image;  // final filter defaults to none in CgConfig
  for (index_t i = 0; i < corrected.size(); ++i) {
    if (corrected.data()[i] != vk.data()[i]) bitwise = false;
  }

  // Closed form on a tiny dense instance: || (A + lambda I)^-1 b || tracks the
  // CG solution within 5% as lambda scales by 10.
  const index_t m = 12;
  const Array2D<Cx> a = oracles::random_hpd(m, 55, 0.1);
  const auto rhs = oracles::random_cx_vector(static_cast<size_t>(m), 56);
  bool closed_ok = true;
  std::ostringstream norms;
  double prev_norm = 1e300;
  bool shrinks = true;
  for (double lambda : {0.4, 4.0}) {
    Array2D<Cx> reg = a;
    for (index_t i = 0; i < m; ++i) reg(i, i) += lambda;
    auto dense_normal = [&reg](const std::vector<Cx>& x) {
      std::vector<Cx> y(x.size());
      for (index_t i = 0; i < reg.rows(); ++i) {
        Cx acc{0.0, 0.0};
        for (index_t j = 0; j < reg.cols(); ++j) acc += reg(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
      }
      return y;
    };
    const CgOutcome got = cg_solve_operator(dense_normal, rhs, 60, 0.0);
    const auto want = oracles::dense_solve(reg, rhs);
    const double ratio = oracles::l2(got.solution) / oracles::l2(want);
    if (std::abs(ratio - 1.0) > 0.05) closed_ok = false;
    if (oracles::l2(got.solution) >= prev_norm) shrinks = false;
    prev_norm = oracles::l2(got.solution);
    norms << " |v(" << lambda << ")| = " << oracles::l2(got.solution);
  }
  std::ostringstream d;
  d << "lambda=0 bitwise equal = " << (bitwise ? "yes" : "no") << ", closed-form norm match within 5% = "
    << (closed_ok ? "yes" : "no") << ", norm shrinks with lambda x10 = " << (shrinks ? "yes" : "no") << ","
    << norms.str();
  return {bitwise && closed_ok && shrinks, false, d.str()};
}

// ---- C6: filter exactness ----------------------------------------------------

Outcome c6_filter() {
  const GridGeometry g = geometry(64);
  const auto arctan_w = filter_weights(FilterSpec::arctan(16.0), g);
  const double at_cutoff = arctan_w(32, 48);
  const bool arctan_ok = std::abs(at_cutoff - 0.5) <= 1e-12;

  const Image x = oracles::random_cx_image(64, 11);
  Array2D<Cx> k = fft_centered(x);
  const auto hard = filter_weights(FilterSpec::hard_circle(20.0), g);
  kernels::active().rmul(k.data(), hard.data(), k.size());
  double outside = 0.0;
  for (index_t r = 0; r < 64; ++r) {
    for (index_t c = 0; c < 64; ++c) {
      if (std::hypot(static_cast<double>(r) - 32.0, static_cast<double>(c) - 32.0) > 20.0) {
        outside += std::norm(k(r, c));
      }
    }
  }
  std::ostringstream d;
  d << "arctan(|k|=k_c) = " << at_cutoff << ", hard-circle energy outside support = " << outside;
  return {arctan_ok && outside == 0.0, false, d.str()};
}

// ---- C7: DCF sanity ------------------------------------------------------------

Outcome c7_dcf() {
  const GriddingKernel kernel = build_kernel(5, 10000, 2.0);

  // Complete Cartesian sampling: constant interior weights.
  const int extent = 20;
  const int side = 2 * extent + 1;
  Array3D<double> cart(3, side, side);
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      cart(0, i, j) = j - extent;
      cart(1, i, j) = i - extent;
    }
  }
  const GridGeometry g = geometry(32);
  const DensityWeights wc = dcf_gridded_ones(cart, kernel, g);
  double lo = 2.0, hi = -1.0;
  for (index_t s = 0; s < side; ++s) {
    for (index_t r = 0; r < side; ++r) {
      if (std::max(std::abs(cart(0, s, r)), std::abs(cart(1, s, r))) > extent - kernel.width) continue;
      lo = std::min(lo, wc.weights(s, r));
      hi = std::max(hi, wc.weights(s, r));
    }
  }
  const double spread = (hi - lo) / hi;

  // Scale invariance. The ramp is exact. The gridded variant's max-weight
  // normalizer sits in the edge-truncated outer band, which is grid-resolution
  // dependent, so its invariant is the mean-normalized weight pattern away
  // from the kernel-dominated DC and edge bands.
  const auto traj = make_radial_trajectory(33, 64, 64);
  Array3D<double> scaled = traj;
  for (double& v : scaled.flat()) v *= 0.5;
  const DensityWeights r0 = dcf_ramp(traj);
  const DensityWeights r1 = dcf_ramp(scaled);
  double ramp_dev = 0.0;
  for (index_t i = 0; i < r0.weights.size(); ++i) {
    ramp_dev = std::max(ramp_dev, std::abs(r0.weights.data()[i] - r1.weights.data()[i]));
  }
  const DensityWeights g0 = dcf_gridded_ones(traj, kernel, geometry(32));
  const DensityWeights g1 = dcf_gridded_ones(scaled, kernel, geometry(16));
  auto interior = [&](double rad) { return rad >= 2.0 * kernel.width && rad <= 32.0 - 2.0 * kernel.width; };
  double m0 = 0.0, m1 = 0.0;
  index_t cnt = 0;
  for (index_t s = 0; s < traj.dim1(); ++s) {
    for (index_t r = 0; r < traj.dim2(); ++r) {
      if (!interior(std::hypot(traj(0, s, r), traj(1, s, r)))) continue;
      m0 += g0.weights(s, r);
      m1 += g1.weights(s, r);
      ++cnt;
    }
  }
  m0 /= static_cast<double>(cnt);
  m1 /= static_cast<double>(cnt);
  double grid_dev = 0.0;
  for (index_t s = 0; s < traj.dim1(); ++s) {
    for (index_t r = 0; r < traj.dim2(); ++r) {
      if (!interior(std::hypot(traj(0, s, r), traj(1, s, r)))) continue;
      grid_dev = std::max(grid_dev, std::abs(g0.weights(s, r) / m0 - g1.weights(s, r) / m1));
    }
  }
  std::ostringstream d;
  d << "Cartesian interior spread = " << spread << " (< 1e-6), ramp scale deviation = " << ramp_dev
    << " (< 1e-12), gridded-ones mean-normalized pattern deviation = " << grid_dev
    << " (< 0.05, kernel discretization)";
  return {spread < 1e-6 && ramp_dev < 1e-12 && grid_dev < 0.05, false, d.str()};
}

// ---- C8: pre-whitening ----------------------------------------------------------

Outcome c8_prewhiten() {
  const index_t nc = 3, draws = 100000;
  Array2D<Cx> cov(nc, nc);
  cov(0, 0) = Cx{2.0, 0.0};
  cov(1, 1) = Cx{1.0, 0.0};
  cov(2, 2) = Cx{0.5, 0.0};
  cov(0, 1) = Cx{0.7, 0.2};
  cov(1, 0) = std::conj(cov(0, 1));
  cov(1, 2) = Cx{-0.1, 0.3};
  cov(2, 1) = std::conj(cov(1, 2));

  Array2D<Cx> lower;
  index_t bad = -1;
  if (!linalg::cholesky(cov, lower, bad)) return {false, false, "test covariance not PD"};

  KSpaceDataset d;
  d.samples = Array3D<Cx>(nc, 1, draws);
  d.trajectory = Array3D<double>(3, 1, draws);
  for (index_t r = 0; r < draws; ++r) d.trajectory(0, 0, r) = static_cast<double>(r % 5);
  std::mt19937_64 rng(5150);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  for (index_t r = 0; r < draws; ++r) {
    Cx white[3];
    for (index_t c = 0; c < nc; ++c) white[c] = Cx{gauss(rng), gauss(rng)};
    for (index_t c = 0; c < nc; ++c) {
      Cx acc{0.0, 0.0};
      for (index_t k = 0; k <= c; ++k) acc += lower(c, k) * white[k];
      d.samples(c, 0, r) = acc;
    }
  }
  const KSpaceDataset w = prewhiten(d, make_noise_model(cov));
  double worst = 0.0;
  for (index_t i = 0; i < nc; ++i) {
    for (index_t j = 0; j < nc; ++j) {
      Cx acc{0.0, 0.0};
      for (index_t r = 0; r < draws; ++r) acc += w.samples(i, 0, r) * std::conj(w.samples(j, 0, r));
      acc /= static_cast<double>(draws);
      const Cx want = i == j ? Cx{1.0, 0.0} : Cx{0.0, 0.0};
      worst = std::max(worst, std::abs(acc - want));
    }
  }
  std::ostringstream out;
  out << "max |empirical covariance - identity| entry = " << worst << " over " << draws << " draws";
  return {worst < 0.05, false, out.str()};
}

// ---- C9: metrics -----------------------------------------------------------------

Outcome c9_metrics() {
  const Image x = oracles::random_cx_image(32, 5);
  const double self_nrmse = nrmse(x, x, full_mask(32, 32));
  const double self_ssim = ssim(x, x, full_mask(32, 32));
  const Image norm = quantile_normalize(x, 0.95);
  const double q = magnitude_quantile(norm, 0.95);
  const Image ones(10, 10, Cx{1.0, 0.0});
  const Image ones11(10, 10, Cx{1.1, 0.0});
  const double hand = nrmse(ones11, ones, full_mask(10, 10));
  std::ostringstream d;
  d << "nrmse(x,x) = " << self_nrmse << ", ssim(x,x) = " << self_ssim << ", post-normalization quantile = " << q
    << ", hand case = " << hand;
  const bool ok = self_nrmse == 0.0 && std::abs(self_ssim - 1.0) <= 1e-12 && std::abs(q - 1.0) <= 1e-12 &&
                  std::abs(hand - 0.1) <= 1e-12;
  return {ok, false, d.str()};
}

// ---- C10: determinism ---------------------------------------------------------------

std::vector<char> slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return {};
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome c10_determinism() {
  const char* cli = std::getenv("CGSENSE_CLI");
  if (!cli) return {false, false, "CGSENSE_CLI not set (point it at the cgsense binary)"};

  const fs::path base = fs::temp_directory_path() / "cgsense_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string simargs = "simulate --n 32 --coils 3 --spokes 51 --read 64 --snr 25 --correlated-noise --seed 77";

  for (const char* run : {"a", "b"}) {
    const fs::path dir = base / run;
    fs::create_directories(dir);
    if (run_cli(cli, simargs + " --out " + (dir / "sim.h5").string()) != 0) {
      return {false, false, "simulate failed"};
    }
    if (run_cli(cli, "recon --input " + (dir / "sim.h5").string() + " --output-dir " + (dir / "rec").string() +
                         " --threads 1") != 0) {
      return {false, false, "recon failed"};
    }
    if (run_cli(cli, "compare " + (dir / "rec" / "f1_final.h5").string() + " " + (dir / "sim_truth.h5").string() +
                         " --output-dir " + (dir / "cmp").string()) != 0) {
      return {false, false, "compare failed"};
    }
  }
  bool identical = true;
  std::string first_diff;
  for (const char* rel :
       {"sim.h5", "sim_truth.h5", "rec/f1_final.h5", "rec/f1_final.png", "rec/f1_initial.h5", "rec/residuals.json",
        "rec/montage.png", "cmp/report.json", "cmp/diff.h5"}) {
    const auto a = slurp(base / "a" / rel), b = slurp(base / "b" / rel);
    if (a.empty() || a != b) {
      identical = false;
      if (first_diff.empty()) first_diff = rel;
    }
  }

  // Thread-count independence of the reconstruction.
  const fs::path t4 = base / "t4";
  fs::create_directories(t4);
  if (run_cli(cli, "recon --input " + (base / "a" / "sim.h5").string() + " --output-dir " + t4.string() +
                       " --threads 4") != 0) {
    return {false, false, "recon with 4 threads failed"};
  }
  const bool threads_same = slurp(base / "a" / "rec" / "f1_final.h5") == slurp(t4 / "f1_final.h5") &&
                            !slurp(t4 / "f1_final.h5").empty();

  // Spelling out the consolidated defaults changes nothing.
  const fs::path flags = base / "flags";
  fs::create_directories(flags);
  if (run_cli(cli, "recon --input " + (base / "a" / "sim.h5").string() + " --output-dir " + flags.string() +
                       " --threads 1 --iterations 10 --lambda 0") != 0) {
    return {false, false, "recon with explicit flags failed"};
  }
  const bool flags_same = slurp(base / "a" / "rec" / "f1_final.h5") == slurp(flags / "f1_final.h5");

  std::ostringstream d;
  d << "repeat runs byte-identical = " << (identical ? "yes" : (std::string("no, first diff: ") + first_diff))
    << ", threads {1,4} byte-identical = " << (threads_same ? "yes" : "no")
    << ", explicit --iterations 10 --lambda 0 identical = " << (flags_same ? "yes" : "no");
  return {identical && threads_same && flags_same, false, d.str()};
}

// ---- C11: optional challenge-data integration ----------------------------------------

Outcome c11_challenge() {
  const char* path = std::getenv("CGSENSE_CHALLENGE_BRAIN");
  if (!path || !fs::exists(path)) {
    return {true, true, "optional: set CGSENSE_CHALLENGE_BRAIN to the challenge brain .h5 to run"};
  }
  const char* cli = std::getenv("CGSENSE_CLI");
  if (!cli) return {false, false, "CGSENSE_CLI not set"};

  const fs::path base = fs::temp_directory_path() / "cgsense_challenge";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "config.json";
  {
    std::ofstream f(cfg);
    f << R"({"undersampling": {"scheme": "skip", "values": [1, 2, 3, 4]}})";
  }
  const int rc = run_cli(cli, "recon --input " + std::string(path) + " --config " + cfg.string() +
                                  " --output-dir " + (base / "rec").string());
  if (rc != 0) return {false, false, "recon over factors {1,2,3,4} exited nonzero"};
  for (int f : {1, 2, 3, 4}) {
    const Image img = read_image((base / "rec" / ("f" + std::to_string(f) + "_final.h5")).string());
    if (img.rows() != 300 || img.cols() != 300) {
      return {false, false, "factor " + std::to_string(f) + " image is not 300x300"};
    }
  }
  return {true, false, "factors {1,2,3,4} reconstructed at 300x300, exit 0"};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"C1 NUFFT oracle equivalence", c1_nufft_oracle},
      {"C2 encoding operator adjointness", c2_adjointness},
      {"C3 CG matches dense solve", c3_cg_dense},
      {"C4 end-to-end recovery", c4_end_to_end},
      {"C5 regularization behavior", c5_regularization},
      {"C6 filter exactness", c6_filter},
      {"C7 DCF sanity", c7_dcf},
      {"C8 pre-whitening", c8_prewhiten},
      {"C9 metrics", c9_metrics},
      {"C10 determinism", c10_determinism},
      {"C11 challenge data (optional)", c11_challenge},
  };
  int failures = 0;
  for (const Entry& e : entries) {
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, false, std::string("exception: ") + ex.what()};
    }
    const char* verdict = o.skipped ? "SKIP" : (o.pass ? "PASS" : "FAIL");
    std::printf("%s %s: %s\n", verdict, e.name, o.detail.c_str());
    if (!o.pass && !o.skipped) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
