#pragma once

#include <map>
#include <string>

#include "cgsense/cg.hpp"
#include "cgsense/types.hpp"

namespace cgsense {

// Hierarchical container I/O (HDF5). On-disk order follows the BART
// convention: rawdata [1, Readout, Spokes, Channels], trajectory
// [3, Readout, Spokes]; complex values are (real, imag) float64 pairs
// (h5py-style compound, interleaved on disk). The reader permutes into the
// canonical memory order and accepts a dataset name mapping for files that
// use different keys.

struct DatasetNames {
  std::string rawdata = "rawdata";
  std::string trajectory = "trajectory";
  std::string sensitivities = "sensitivities";
  std::string noise_covariance = "noise_covariance";
};

KSpaceDataset read_dataset(const std::string& path, const DatasetNames& names = {});
void write_dataset(const std::string& path, const KSpaceDataset& dataset, const DatasetNames& names = {});

// Full run configuration with the consolidated defaults. Unknown keys warn,
// invalid values throw.
struct RunConfig {
  ReconOptions recon;
  struct {
    std::string scheme = "none";  // none | skip | first
    std::vector<index_t> values;  // factors or spoke counts
  } undersampling;
  DatasetNames dataset_names;
  std::string output_dir = ".";
  uint64_t seed = 1234;

  std::vector<std::string> warnings;  // unknown keys seen while parsing
};

RunConfig read_config(const std::string& path);
RunConfig parse_config_json(const std::string& text);

// Emits <stem>.h5 (full-precision complex image, dataset "image"), and
// <stem>.pgm / <stem>.png 8-bit magnitude windowed min -> max (a constant
// image maps to mid-gray).
void write_image_files(const Image& image, const std::string& path_stem);

Image read_image(const std::string& path);

// 8-bit grayscale helpers shared with the CLI montage.
Array2D<uint8_t> window_to_gray(const Array2D<double>& values);
void write_pgm(const Array2D<uint8_t>& gray, const std::string& path);
void write_png(const Array2D<uint8_t>& gray, const std::string& path);

// Real-valued auxiliary arrays (DCF weights, difference maps).
void write_real_array(const std::string& path, const std::string& name, const Array2D<double>& values);
Array2D<double> read_real_array(const std::string& path, const std::string& name);

}  // namespace cgsense
