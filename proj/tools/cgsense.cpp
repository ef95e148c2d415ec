// cgsense: simulate / recon / dcf / compare pipeline driver.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cgsense/cg.hpp"
#include "cgsense/data_model.hpp"
#include "cgsense/io_container.hpp"
#include "cgsense/metrics.hpp"
#include "cgsense/simulator.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cgsense;

namespace {

void log_stage(const std::string& stage, double ms, const std::string& note = {}) {
  json line{{"stage", stage}, {"ms", ms}};
  if (!note.empty()) line["note"] = note;
  std::cerr << line.dump() << "\n";
}

void log_run(const ReconRun& run) {
  for (const auto& s : run.stages) log_stage(s.stage, s.milliseconds, s.note);
  for (const auto& w : run.warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
}

std::string strip_h5(std::string path) {
  if (path.size() > 3 && path.substr(path.size() - 3) == ".h5") path.resize(path.size() - 3);
  return path;
}

Array2D<double> magnitude_of(const Image& img) {
  Array2D<double> m(img.rows(), img.cols());
  for (index_t i = 0; i < img.size(); ++i) m.data()[i] = std::abs(img.data()[i]);
  return m;
}

// Tiles of magnitude images, each windowed min->max, arranged row-major with
// a 2-pixel gutter.
Array2D<uint8_t> montage(const std::vector<std::vector<Image>>& rows) {
  index_t tile = 0;
  size_t cols = 0;
  for (const auto& row : rows) {
    cols = std::max(cols, row.size());
    for (const auto& img : row) tile = std::max(tile, img.rows());
  }
  if (tile == 0 || cols == 0) return Array2D<uint8_t>(1, 1, 0);
  const index_t gap = 2;
  Array2D<uint8_t> out(static_cast<index_t>(rows.size()) * (tile + gap) - gap,
                       static_cast<index_t>(cols) * (tile + gap) - gap, 0);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) {
      const Array2D<uint8_t> g = window_to_gray(magnitude_of(rows[r][c]));
      const index_t r0 = static_cast<index_t>(r) * (tile + gap);
      const index_t c0 = static_cast<index_t>(c) * (tile + gap);
      for (index_t i = 0; i < g.rows(); ++i) {
        for (index_t j = 0; j < g.cols(); ++j) out(r0 + i, c0 + j) = g(i, j);
      }
    }
  }
  return out;
}

struct GlobalOpts {
  std::string config_path;
  std::string output_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool threads_set = false;
};

RunConfig load_config(const GlobalOpts& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : read_config(g.config_path);
  for (const auto& w : cfg.warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
  if (!g.output_dir.empty()) cfg.output_dir = g.output_dir;
  if (g.seed_set) cfg.seed = g.seed;
  if (g.threads_set) cfg.recon.threads = g.threads;
  return cfg;
}

int run_simulate(const GlobalOpts& g, int n, int n_coils, int n_spokes, int n_read, double oversampling,
                 double snr, bool correlated_noise, std::string out) {
  RunConfig cfg = load_config(g);
  fs::create_directories(cfg.output_dir);
  if (out.empty()) out = (fs::path(cfg.output_dir) / "simulated.h5").string();

  const Image phantom = make_phantom(default_shepp_logan(n));
  const SensitivitySet maps = make_coil_maps(n, n_coils);
  const int n_os = static_cast<int>(std::lround(n * oversampling));
  const auto traj = make_radial_trajectory(n_spokes, n_read, n_os);

  std::optional<Array2D<Cx>> cov;
  if (correlated_noise && snr > 0.0) {
    Array2D<Cx> c(n_coils, n_coils);
    for (index_t i = 0; i < n_coils; ++i) {
      c(i, i) = Cx{1.0, 0.0};
      for (index_t j = 0; j < i; ++j) {
        const double rho = 0.25 / static_cast<double>(1 + std::abs(static_cast<long>(i - j)));
        c(i, j) = Cx{rho, 0.05};
        c(j, i) = std::conj(c(i, j));
      }
    }
    cov = std::move(c);
  }

  Simulation sim = simulate_acquisition(phantom, maps, traj, cov, snr, cfg.seed, cfg.recon.threads);

  // Challenge convention on disk: trajectory in target-FOV grid units
  // (entries +-n/2, readout spacing 1/oversampling).
  for (double& v : sim.data.trajectory.flat()) v /= oversampling;
  write_dataset(out, sim.data, cfg.dataset_names);
  write_image_files(sim.phantom, strip_h5(out) + "_truth");
  log_stage("simulate", 0.0, out);
  std::cout << json{{"written", out}, {"truth", strip_h5(out) + "_truth.h5"}}.dump() << "\n";
  return 0;
}

int run_recon(const GlobalOpts& g, const std::string& input, int iterations_override, double lambda_override,
              bool have_iters, bool have_lambda) {
  RunConfig cfg = load_config(g);
  if (have_iters) {
    if (iterations_override < 1) fail_usage("--iterations must be >= 1");
    cfg.recon.max_iterations = iterations_override;
  }
  if (have_lambda) {
    if (lambda_override < 0.0) fail_usage("--lambda must be >= 0");
    cfg.recon.lambda = lambda_override;
  }
  fs::create_directories(cfg.output_dir);

  const KSpaceDataset data = read_dataset(input, cfg.dataset_names);

  struct SeriesEntry {
    UndersampleScheme scheme;
    index_t value;
    std::string tag;
  };
  std::vector<SeriesEntry> series;
  if (cfg.undersampling.scheme == "skip") {
    for (index_t v : cfg.undersampling.values) {
      series.push_back({UndersampleScheme::skip_every_rth, v, "f" + std::to_string(v)});
    }
  } else if (cfg.undersampling.scheme == "first") {
    for (index_t v : cfg.undersampling.values) {
      series.push_back({UndersampleScheme::first_p_spokes, v, "p" + std::to_string(v)});
    }
  }
  if (series.empty()) series.push_back({UndersampleScheme::skip_every_rth, 1, "f1"});

  json residuals = json::array();
  std::vector<std::vector<Image>> tiles(2);
  for (const SeriesEntry& entry : series) {
    const KSpaceDataset subset = undersample(data, entry.scheme, entry.value);
    const ReconRun run = reconstruct(subset, cfg.recon);
    log_run(run);
    const std::string stem = (fs::path(cfg.output_dir) / entry.tag).string();
    write_image_files(run.result.initial_image, stem + "_initial");
    write_image_files(run.result.final_image, stem + "_final");
    residuals.push_back({{"subset", entry.tag},
                         {"spokes", subset.n_spokes()},
                         {"iterations", run.result.iterations_run},
                         {"residual_history", run.result.residual_history},
                         {"dropped_samples", run.result.dropped_sample_count},
                         {"matrix_size", run.geometry.matrix_size},
                         {"grid_size", run.geometry.grid_size},
                         {"oversampling_ratio", run.geometry.oversampling_ratio}});
    tiles[0].push_back(run.result.initial_image);
    tiles[1].push_back(run.result.final_image);
    std::cout << json{{"subset", entry.tag},
                      {"final", stem + "_final.h5"},
                      {"iterations", run.result.iterations_run},
                      {"final_residual", run.result.residual_history.back()}}
                     .dump()
              << "\n";
  }
  {
    std::ofstream f(fs::path(cfg.output_dir) / "residuals.json");
    f << residuals.dump(2) << "\n";
  }
  write_png(montage(tiles), (fs::path(cfg.output_dir) / "montage.png").string());
  return 0;
}

int run_dcf(const GlobalOpts& g, const std::string& input, const std::string& method, std::string out) {
  RunConfig cfg = load_config(g);
  fs::create_directories(cfg.output_dir);
  if (out.empty()) out = (fs::path(cfg.output_dir) / "dcf.h5").string();

  const KSpaceDataset data = read_dataset(input, cfg.dataset_names);
  RescaledTrajectory rs = rescale_to_grid_units(data.trajectory);
  std::optional<double> ratio = cfg.recon.oversampling_ratio_override;
  if (!ratio && rs.factor > 1.0) ratio = rs.factor;
  const GridGeometry geom = derive_geometry(rs.trajectory, ratio);

  DensityWeights w;
  if (method == "ramp") {
    w = dcf_ramp(rs.trajectory);
  } else if (method == "gridded_ones") {
    const GriddingKernel kernel =
        build_kernel(cfg.recon.kernel_width, cfg.recon.kernel_table_points, geom.oversampling_ratio,
                     cfg.recon.kernel_lookup);
    w = dcf_gridded_ones(rs.trajectory, kernel, geom);
  } else {
    fail_usage("dcf method must be gridded_ones or ramp");
  }
  write_real_array(out, "dcf", w.weights);
  std::cout << json{{"written", out}, {"method", method}, {"spokes", w.weights.rows()}}.dump() << "\n";
  return 0;
}

int run_compare(const GlobalOpts& g, const std::string& a_path, const std::string& b_path,
                const std::string& mask_path) {
  RunConfig cfg = load_config(g);
  fs::create_directories(cfg.output_dir);

  const Image a = read_image(a_path);
  const Image b = read_image(b_path);
  std::optional<Array2D<uint8_t>> mask;
  if (!mask_path.empty()) {
    const Image m = read_image(mask_path);
    Array2D<uint8_t> mk(m.rows(), m.cols());
    for (index_t i = 0; i < m.size(); ++i) mk.data()[i] = std::abs(m.data()[i]) > 0.5;
    mask = std::move(mk);
  }

  const ComparisonReport rep = compare_images(a, b, std::move(mask));

  json out{{"nrmse", rep.nrmse},
           {"ssim", rep.ssim},
           {"normalization_quantile", rep.normalization_quantile},
           {"compared_size", rep.compared_size}};
  {
    std::ofstream f(fs::path(cfg.output_dir) / "report.json");
    f << out.dump(2) << "\n";
  }
  Image diff_img(rep.diff_map.rows(), rep.diff_map.cols());
  for (index_t i = 0; i < diff_img.size(); ++i) diff_img.data()[i] = Cx{rep.diff_map.data()[i], 0.0};
  write_image_files(diff_img, (fs::path(cfg.output_dir) / "diff").string());
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CG-SENSE reconstruction pipeline for non-Cartesian multi-coil MRI"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--output-dir", g.output_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (overrides config)");
  auto* thr_opt = app.add_option("--threads", g.threads, "worker threads, 0 = all cores");

  auto* sim = app.add_subcommand("simulate", "generate a synthetic radial acquisition");
  int n = 64, n_coils = 8, n_spokes = 101, n_read = 128;
  double oversampling = 2.0, snr = 0.0;
  bool correlated = false;
  std::string sim_out;
  sim->add_option("--n", n, "phantom matrix size")->check(CLI::PositiveNumber);
  sim->add_option("--coils", n_coils, "number of receive coils")->check(CLI::PositiveNumber);
  sim->add_option("--spokes", n_spokes, "number of radial spokes")->check(CLI::PositiveNumber);
  sim->add_option("--read", n_read, "readout points per spoke")->check(CLI::PositiveNumber);
  sim->add_option("--oversampling", oversampling, "grid oversampling ratio")->check(CLI::Range(1.01, 8.0));
  sim->add_option("--snr", snr, "signal-to-noise ratio, 0 = noiseless");
  sim->add_flag("--correlated-noise", correlated, "draw coil-correlated noise");
  sim->add_option("--out", sim_out, "output container path");

  auto* rec = app.add_subcommand("recon", "CG-SENSE reconstruction over the configured undersampling series");
  std::string rec_input;
  int iters = 10;
  double lambda = 0.0;
  rec->add_option("--input", rec_input, "input container")->required();
  auto* it_opt = rec->add_option("--iterations", iters, "CG iterations");
  auto* la_opt = rec->add_option("--lambda", lambda, "Tikhonov weight");

  auto* dcf = app.add_subcommand("dcf", "compute density compensation weights");
  std::string dcf_input, dcf_method = "gridded_ones", dcf_out;
  dcf->add_option("--input", dcf_input, "input container")->required();
  dcf->add_option("--method", dcf_method, "gridded_ones | ramp");
  dcf->add_option("--out", dcf_out, "output path");

  auto* cmp = app.add_subcommand("compare", "metrics and difference map between two images");
  std::string cmp_a, cmp_b, cmp_mask;
  cmp->add_option("a", cmp_a, "image A (.h5)")->required();
  cmp->add_option("b", cmp_b, "reference image B (.h5)")->required();
  cmp->add_option("--mask", cmp_mask, "binary mask image (.h5)");

  try {
    app.parse(argc, argv);
    g.seed_set = seed_opt->count() > 0;
    g.threads_set = thr_opt->count() > 0;
    if (sim->parsed()) return run_simulate(g, n, n_coils, n_spokes, n_read, oversampling, snr, correlated, sim_out);
    if (rec->parsed()) return run_recon(g, rec_input, iters, lambda, it_opt->count() > 0, la_opt->count() > 0);
    if (dcf->parsed()) return run_dcf(g, dcf_input, dcf_method, dcf_out);
    if (cmp->parsed()) return run_compare(g, cmp_a, cmp_b, cmp_mask);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    switch (e.kind()) {
      case ErrorKind::usage: return 2;
      case ErrorKind::numeric: return 4;
      default: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 4;
  }
}
