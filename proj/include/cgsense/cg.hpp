#pragma once

#include <functional>

#include "cgsense/coils.hpp"
#include "cgsense/density.hpp"
#include "cgsense/kspace_filter.hpp"
#include "cgsense/nufft.hpp"

namespace cgsense {

// Encoding operator E: image -> per-coil k-space samples, with the square
// root of the density compensation folded into both E and E^H so the pair
// stays exactly adjoint. The intensity correction (reciprocal of the
// sensitivity L2 norm, zero off the support mask) enters the normal operator
// symmetrically.
struct EncodingOperator {
  NufftPlan plan;
  Array3D<double> trajectory;
  SensitivitySet sensitivities;
  Array2D<double> sqrt_dcf;        // [spoke][read]
  Array2D<double> intensity_recip; // 1/intensity on support, 0 elsewhere
  double lambda = 0.0;
  int threads = 0;

  index_t n_coils() const { return sensitivities.n_coils(); }
  int n() const { return plan.matrix_size(); }
};

EncodingOperator make_encoding_operator(NufftPlan plan, Array3D<double> trajectory, SensitivitySet sensitivities,
                                        const DensityWeights& dcf, double lambda = 0.0, int threads = 0);

// E v: per coil, multiply by the coil map, forward NUFFT, weight by sqrt(DCF).
Array3D<Cx> apply_forward(const EncodingOperator& op, const Image& image);

// E^H m: per coil, weight by sqrt(DCF), adjoint NUFFT, multiply by the
// conjugate map, sum over coils.
Image apply_adjoint(const EncodingOperator& op, const Array3D<Cx>& samples);

// (E~^H E~ + lambda I) x with the intensity correction applied before E and
// after E^H. Hermitian positive semi-definite.
Image apply_normal(const EncodingOperator& op, const Image& image);

struct CgConfig {
  int max_iterations = 10;
  double tolerance_epsilon = 0.0;  // 0 disables the early stop
  bool check_operator = true;      // Hermitian/PSD probes before iterating
  bool store_iterates = false;
  FilterSpec final_filter;         // applied to the final image only
};

struct ReconResult {
  Image initial_image;                  // intensity-corrected E^H m
  Image final_image;                    // intensity-corrected iterate, filtered
  std::vector<Image> iterate_images;    // optional, intensity-corrected
  std::vector<double> residual_history; // delta per Algorithm-1 loop top, [0] = 1
  int iterations_run = 0;
  index_t dropped_sample_count = 0;
  int non_monotone_steps = 0;           // residual increases beyond 1e-6 slack
};

// Algorithm 1 on the normal equations: v0 = 0, b = E~^H m~, r0 = b, p0 = r0,
// alpha/beta updates, stop at max_iterations or delta < epsilon. delta is
// r_i^H r_i / r_0^H r_0.
ReconResult cg_solve(const EncodingOperator& op, const Array3D<Cx>& samples, const CgConfig& config);

// Generic CG core over flat complex vectors for any Hermitian PSD operator;
// the dense oracle tests drive this directly.
struct CgOutcome {
  std::vector<Cx> solution;
  std::vector<double> residual_history;
  int iterations_run = 0;
  int non_monotone_steps = 0;
};

CgOutcome cg_solve_operator(const std::function<std::vector<Cx>(const std::vector<Cx>&)>& normal_op,
                            const std::vector<Cx>& rhs, int max_iterations, double tolerance_epsilon,
                            const std::function<void(const std::vector<Cx>&)>& per_iteration = {});

// Full consolidated pipeline: optional pre-whitening, sensitivities (supplied
// or SoS), DCF, operator, CG, intensity correction, k-space filter.
struct ReconOptions {
  int max_iterations = 10;
  double lambda = 0.0;
  double tolerance_epsilon = 0.0;
  int kernel_width = 5;
  int kernel_table_points = 10000;
  GriddingKernel::Lookup kernel_lookup = GriddingKernel::Lookup::linear;
  std::optional<double> oversampling_ratio_override;
  int sensitivity_window_width = 50;
  double mask_threshold = 0.1;
  enum class SensitivitySource { auto_detect, sos, file } sensitivity_source = SensitivitySource::auto_detect;
  enum class DcfMethod { gridded_ones, ramp } dcf_method = DcfMethod::gridded_ones;
  std::optional<FilterSpec> filter;  // default: hard circle at the acquired support radius
  bool store_iterates = false;
  bool check_operator = true;
  int threads = 0;
};

struct StageLog {
  std::string stage;
  double milliseconds = 0.0;
  std::string note;
};

struct ReconRun {
  ReconResult result;
  GridGeometry geometry;
  std::vector<StageLog> stages;
  std::vector<std::string> warnings;
};

ReconRun reconstruct(const KSpaceDataset& dataset, const ReconOptions& options);

}  // namespace cgsense
