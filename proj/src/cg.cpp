#include "cgsense/cg.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "cgsense/data_model.hpp"
#include "cgsense/errors.hpp"
#include "cgsense/simd_kernels.hpp"
#include "cgsense/threading.hpp"

namespace cgsense {
namespace {

Cx dot(std::span<const Cx> a, std::span<const Cx> b) {
  Cx acc{0.0, 0.0};
  for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm2(std::span<const Cx> a) {
  double acc = 0.0;
  for (const Cx& v : a) acc += std::norm(v);
  return acc;
}

Image apply_intensity_recip(const EncodingOperator& op, const Image& x) {
  Image out = x;
  kernels::active().rmul(out.data(), op.intensity_recip.data(), out.size());
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Per-coil count of samples the circular-support rule excludes from gridding.
index_t count_dropped(const Array3D<double>& trajectory, const GridGeometry& geometry) {
  const double rmax2 = static_cast<double>(geometry.half_grid()) * static_cast<double>(geometry.half_grid());
  index_t dropped = 0;
  for (index_t s = 0; s < trajectory.dim1(); ++s) {
    for (index_t r = 0; r < trajectory.dim2(); ++r) {
      const double kx = trajectory(0, s, r), ky = trajectory(1, s, r);
      if (kx * kx + ky * ky > rmax2) ++dropped;
    }
  }
  return dropped;
}

}  // namespace

EncodingOperator make_encoding_operator(NufftPlan plan, Array3D<double> trajectory, SensitivitySet sensitivities,
                                        const DensityWeights& dcf, double lambda, int threads) {
  EncodingOperator op;
  if (sensitivities.n() != plan.matrix_size()) fail_data("encoding operator: sensitivity size disagrees with geometry");
  if (lambda < 0.0) fail_data("encoding operator: lambda must be >= 0");
  op.plan = std::move(plan);
  op.trajectory = std::move(trajectory);
  op.sensitivities = std::move(sensitivities);
  op.lambda = lambda;
  op.threads = threads;
  op.sqrt_dcf = Array2D<double>(dcf.weights.rows(), dcf.weights.cols());
  for (index_t i = 0; i < op.sqrt_dcf.size(); ++i) op.sqrt_dcf.data()[i] = std::sqrt(dcf.weights.data()[i]);
  op.intensity_recip = Array2D<double>(op.sensitivities.intensity.rows(), op.sensitivities.intensity.cols());
  for (index_t i = 0; i < op.intensity_recip.size(); ++i) {
    const double v = op.sensitivities.intensity.data()[i];
    op.intensity_recip.data()[i] = op.sensitivities.support.data()[i] && v > 0.0 ? 1.0 / v : 0.0;
  }
  return op;
}

Array3D<Cx> apply_forward(const EncodingOperator& op, const Image& image) {
  if (image.rows() != op.n() || image.cols() != op.n()) fail_data("apply_forward: image shape mismatch");
  const index_t nc = op.n_coils();
  const index_t ns = op.trajectory.dim1(), nr = op.trajectory.dim2();
  Array3D<Cx> out(nc, ns, nr);
  parallel_for(nc, op.threads, [&](index_t c) {
    Image weighted = image;
    kernels::active().cmul(weighted.data(), op.sensitivities.maps.slice(c), weighted.size());
    NufftSamples s = nufft_forward(op.plan, op.trajectory, weighted);
    kernels::active().rmul(s.samples.data(), op.sqrt_dcf.data(), s.samples.size());
    std::copy(s.samples.data(), s.samples.data() + s.samples.size(), out.slice(c));
  });
  return out;
}

Image apply_adjoint(const EncodingOperator& op, const Array3D<Cx>& samples) {
  const index_t nc = op.n_coils();
  const index_t ns = op.trajectory.dim1(), nr = op.trajectory.dim2();
  if (samples.dim0() != nc || samples.dim1() != ns || samples.dim2() != nr) {
    fail_data("apply_adjoint: samples shape mismatch");
  }
  const int n = op.n();
  Array3D<Cx> coil_images(nc, n, n);
  parallel_for(nc, op.threads, [&](index_t c) {
    Array2D<Cx> weighted(ns, nr);
    std::copy(samples.slice(c), samples.slice(c) + ns * nr, weighted.data());
    kernels::active().rmul(weighted.data(), op.sqrt_dcf.data(), weighted.size());
    NufftImage img = nufft_adjoint(op.plan, op.trajectory, weighted);
    std::copy(img.image.data(), img.image.data() + img.image.size(), coil_images.slice(c));
  });
  // Fixed coil order keeps the combine bit-deterministic for any thread count.
  Image out(n, n);
  for (index_t c = 0; c < nc; ++c) {
    kernels::active().conj_mul_add(out.data(), op.sensitivities.maps.slice(c), coil_images.slice(c), out.size());
  }
  return out;
}

Image apply_normal(const EncodingOperator& op, const Image& image) {
  Image x = apply_intensity_recip(op, image);
  Image y = apply_adjoint(op, apply_forward(op, x));
  y = apply_intensity_recip(op, y);
  if (op.lambda != 0.0) {
    for (index_t i = 0; i < y.size(); ++i) y.data()[i] += op.lambda * image.data()[i];
  }
  return y;
}

CgOutcome cg_solve_operator(const std::function<std::vector<Cx>(const std::vector<Cx>&)>& normal_op,
                            const std::vector<Cx>& rhs, int max_iterations, double tolerance_epsilon,
                            const std::function<void(const std::vector<Cx>&)>& per_iteration) {
  if (max_iterations < 1) fail_data("cg_solve: max_iterations must be >= 1");
  CgOutcome out;
  const size_t n = rhs.size();
  std::vector<Cx> v(n, Cx{0.0, 0.0});
  std::vector<Cx> r = rhs;
  std::vector<Cx> p = r;

  const double r0 = norm2(r);
  out.residual_history.push_back(1.0);
  if (r0 <= 0.0) {
    out.solution = std::move(v);
    return out;
  }

  double rr = r0;
  for (int i = 0; i < max_iterations; ++i) {
    const double delta = rr / r0;
    if (tolerance_epsilon > 0.0 && delta < tolerance_epsilon) break;
    const std::vector<Cx> ap = normal_op(p);
    const double pap = dot(p, ap).real();
    if (pap <= 0.0) {
      fail_numeric("cg_solve: operator is not positive definite on the Krylov space (p^H A p = " +
                   std::to_string(pap) + " at iteration " + std::to_string(i) + ")");
    }
    const double alpha = rr / pap;
    for (size_t j = 0; j < n; ++j) v[j] += alpha * p[j];
    for (size_t j = 0; j < n; ++j) r[j] -= alpha * ap[j];
    const double rr_next = norm2(r);
    const double beta = rr_next / rr;
    for (size_t j = 0; j < n; ++j) p[j] = r[j] + beta * p[j];
    rr = rr_next;
    ++out.iterations_run;
    const double delta_next = rr / r0;
    if (delta_next > out.residual_history.back() * (1.0 + 1e-6)) ++out.non_monotone_steps;
    out.residual_history.push_back(delta_next);
    if (per_iteration) per_iteration(v);
    if (rr == 0.0) break;
  }
  out.solution = std::move(v);
  return out;
}

ReconResult cg_solve(const EncodingOperator& op, const Array3D<Cx>& samples, const CgConfig& config) {
  const int n = op.n();

  if (config.check_operator) {
    // Hermitian symmetry and nonnegative curvature on seeded probe images.
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Image x(n, n), y(n, n);
    for (index_t i = 0; i < x.size(); ++i) x.data()[i] = Cx{u(rng), u(rng)};
    for (index_t i = 0; i < y.size(); ++i) y.data()[i] = Cx{u(rng), u(rng)};
    const Image ax = apply_normal(op, x);
    const Image ay = apply_normal(op, y);
    const Cx lhs = dot(ax.flat(), y.flat());
    const Cx rhs = dot(x.flat(), ay.flat());
    const double scale = std::sqrt(norm2(ax.flat()) * norm2(y.flat())) + 1e-300;
    if (std::abs(lhs - rhs) / scale > 1e-9) fail_numeric("cg_solve: operator failed the Hermitian probe");
    if (dot(x.flat(), ax.flat()).real() < -1e-10 * norm2(x.flat())) {
      fail_numeric("cg_solve: operator failed the positive semi-definite probe");
    }
  }

  // Normal-equation rhs: the data enter density-weighted (m -> D^1/2 m, the
  // other half of D sits inside the adjoint), then intensity-corrected.
  Array3D<Cx> weighted = samples;
  for (index_t c = 0; c < weighted.dim0(); ++c) {
    kernels::active().rmul(weighted.slice(c), op.sqrt_dcf.data(), op.sqrt_dcf.size());
  }
  Image b = apply_intensity_recip(op, apply_adjoint(op, weighted));

  std::vector<Cx> rhs(b.data(), b.data() + b.size());
  std::vector<Image> iterates;
  auto normal = [&](const std::vector<Cx>& xv) {
    Image x(n, n);
    std::copy(xv.begin(), xv.end(), x.data());
    Image y = apply_normal(op, x);
    return std::vector<Cx>(y.data(), y.data() + y.size());
  };

  std::function<void(const std::vector<Cx>&)> snapshot;
  if (config.store_iterates) {
    snapshot = [&](const std::vector<Cx>& v) {
      Image snap(n, n);
      std::copy(v.begin(), v.end(), snap.data());
      iterates.push_back(apply_intensity_recip(op, snap));
    };
  }
  CgOutcome core = cg_solve_operator(normal, rhs, config.max_iterations, config.tolerance_epsilon, snapshot);

  ReconResult res;
  res.initial_image = apply_intensity_recip(op, b);
  res.residual_history = std::move(core.residual_history);
  res.iterations_run = core.iterations_run;
  res.non_monotone_steps = core.non_monotone_steps;
  res.iterate_images = std::move(iterates);

  Image vk(n, n);
  std::copy(core.solution.begin(), core.solution.end(), vk.data());
  Image corrected = apply_intensity_recip(op, vk);
  res.final_image = apply_filter(corrected, config.final_filter, op.plan.geometry);
  return res;
}

ReconRun reconstruct(const KSpaceDataset& dataset, const ReconOptions& options) {
  ReconRun run;
  auto log_stage = [&](const char* name, const Timer& t, std::string note = {}) {
    run.stages.push_back({name, t.ms(), std::move(note)});
  };

  {
    Timer t;
    ValidationReport rep = validate_dataset(dataset);
    if (!rep.ok()) fail_data("reconstruct: invalid dataset: " + rep.joined());
    log_stage("validate", t);
  }

  KSpaceDataset working = dataset;
  if (dataset.noise_covariance && !dataset.whitened) {
    Timer t;
    working = prewhiten(dataset, make_noise_model(*dataset.noise_covariance));
    log_stage("prewhiten", t);
  }

  {
    Timer t;
    RescaledTrajectory rs = rescale_to_grid_units(working.trajectory);
    if (rs.factor != 1.0) {
      working.trajectory = std::move(rs.trajectory);
      run.warnings.push_back("trajectory rescaled to grid units (factor " + std::to_string(rs.factor) + ")");
    }
    std::optional<double> ratio = options.oversampling_ratio_override;
    if (!ratio && rs.factor > 1.0) ratio = rs.factor;
    run.geometry = derive_geometry(working.trajectory, ratio);
    log_stage("geometry", t,
              "n=" + std::to_string(run.geometry.matrix_size) + " n_os=" + std::to_string(run.geometry.grid_size));
  }

  NufftPlan plan;
  {
    Timer t;
    plan = make_nufft_plan(run.geometry, options.kernel_width, options.kernel_table_points, options.kernel_lookup);
    log_stage("kernel", t);
  }

  DensityWeights dcf;
  {
    Timer t;
    dcf = options.dcf_method == ReconOptions::DcfMethod::ramp
              ? dcf_ramp(working.trajectory)
              : dcf_gridded_ones(working.trajectory, plan.kernel, run.geometry);
    log_stage("dcf", t);
  }

  SensitivitySet sens;
  {
    Timer t;
    const bool have_file_maps = working.sensitivities &&
                                working.sensitivities->dim1() == run.geometry.matrix_size &&
                                working.sensitivities->dim2() == run.geometry.matrix_size;
    const bool want_file = options.sensitivity_source != ReconOptions::SensitivitySource::sos;
    if (options.sensitivity_source == ReconOptions::SensitivitySource::file && !have_file_maps) {
      fail_data("reconstruct: sensitivity_source=file but the dataset has no maps matching the geometry");
    }
    if (want_file && have_file_maps) {
      sens = make_sensitivity_set(*working.sensitivities);
      log_stage("sensitivities", t, "from file");
    } else {
      SosOptions so;
      so.window_width = options.sensitivity_window_width;
      so.mask_threshold = options.mask_threshold;
      so.threads = options.threads;
      sens = estimate_sensitivities_sos(working, plan, so, dcf.flat());
      log_stage("sensitivities", t, "sos estimate");
    }
  }

  EncodingOperator op;
  {
    Timer t;
    op = make_encoding_operator(std::move(plan), working.trajectory, std::move(sens), dcf, options.lambda,
                                options.threads);
    log_stage("operator", t);
  }

  {
    Timer t;
    CgConfig cfg;
    cfg.max_iterations = options.max_iterations;
    cfg.tolerance_epsilon = options.tolerance_epsilon;
    cfg.check_operator = options.check_operator;
    cfg.store_iterates = options.store_iterates;
    double rmax = 0.0;
    for (index_t s = 0; s < working.trajectory.dim1(); ++s) {
      for (index_t r = 0; r < working.trajectory.dim2(); ++r) {
        rmax = std::max(rmax, std::hypot(working.trajectory(0, s, r), working.trajectory(1, s, r)));
      }
    }
    if (options.filter) {
      cfg.final_filter = *options.filter;
    } else {
      // Circular support of the acquired data, in image k-space cells.
      cfg.final_filter = FilterSpec::hard_circle(rmax / run.geometry.oversampling_ratio);
    }
    run.result = cg_solve(op, working.samples, cfg);
    run.result.dropped_sample_count = count_dropped(working.trajectory, run.geometry) * working.samples.dim0();
    const double frac = static_cast<double>(run.result.dropped_sample_count) /
                        static_cast<double>(working.samples.size());
    if (frac > 0.01) {
      run.warnings.push_back("gridding dropped " + std::to_string(100.0 * frac) +
                             "% of samples (outside the k-space grid)");
    }
    log_stage("cg", t, "iterations=" + std::to_string(run.result.iterations_run));
  }
  return run;
}

}  // namespace cgsense
