#include "cgsense/io_container.hpp"

#include <hdf5.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cgsense/data_model.hpp"
#include "cgsense/errors.hpp"

namespace cgsense {
namespace {

using json = nlohmann::json;

struct Hid {
  hid_t id = H5I_INVALID_HID;
  herr_t (*closer)(hid_t) = nullptr;
  Hid(hid_t i, herr_t (*c)(hid_t)) : id(i), closer(c) {}
  ~Hid() {
    if (id >= 0 && closer) closer(id);
  }
  Hid(const Hid&) = delete;
  Hid& operator=(const Hid&) = delete;
  Hid(Hid&& o) noexcept : id(o.id), closer(o.closer) { o.id = H5I_INVALID_HID; }
  operator hid_t() const { return id; }
  bool ok() const { return id >= 0; }
};

hid_t complex_memtype() {
  static hid_t t = [] {
    hid_t c = H5Tcreate(H5T_COMPOUND, 2 * sizeof(double));
    H5Tinsert(c, "r", 0, H5T_NATIVE_DOUBLE);
    H5Tinsert(c, "i", sizeof(double), H5T_NATIVE_DOUBLE);
    return c;
  }();
  return t;
}

// Object creation without modification-time tracking keeps repeated runs
// byte-identical.
Hid quiet_dcpl() {
  hid_t p = H5Pcreate(H5P_DATASET_CREATE);
  H5Pset_obj_track_times(p, false);
  return {p, H5Pclose};
}

// Errors surface as exceptions; the default stderr spew stays off.
void silence_hdf5() { H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr); }

Hid create_file(const std::string& path) {
  silence_hdf5();
  Hid fcpl(H5Pcreate(H5P_FILE_CREATE), H5Pclose);
  H5Pset_obj_track_times(fcpl, false);
  Hid f(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, fcpl, H5P_DEFAULT), H5Fclose);
  if (!f.ok()) fail_io("cannot create file: " + path);
  return f;
}

Hid open_file(const std::string& path) {
  silence_hdf5();
  Hid f(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
  if (!f.ok()) fail_io("cannot open container file: " + path);
  return f;
}

void write_complex(hid_t file, const std::string& name, const std::vector<hsize_t>& dims, const Cx* data) {
  Hid space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose);
  Hid dcpl = quiet_dcpl();
  Hid ds(H5Dcreate2(file, name.c_str(), complex_memtype(), space, H5P_DEFAULT, dcpl, H5P_DEFAULT), H5Dclose);
  if (!ds.ok()) fail_io("cannot create dataset: " + name);
  if (H5Dwrite(ds, complex_memtype(), H5S_ALL, H5S_ALL, H5P_DEFAULT, data) < 0) {
    fail_io("write failed for dataset: " + name);
  }
}

void write_real(hid_t file, const std::string& name, const std::vector<hsize_t>& dims, const double* data) {
  Hid space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose);
  Hid dcpl = quiet_dcpl();
  Hid ds(H5Dcreate2(file, name.c_str(), H5T_NATIVE_DOUBLE, space, H5P_DEFAULT, dcpl, H5P_DEFAULT), H5Dclose);
  if (!ds.ok()) fail_io("cannot create dataset: " + name);
  if (H5Dwrite(ds, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, data) < 0) {
    fail_io("write failed for dataset: " + name);
  }
}

bool dataset_exists(hid_t file, const std::string& name) {
  return H5Lexists(file, name.c_str(), H5P_DEFAULT) > 0;
}

std::vector<hsize_t> dataset_dims(hid_t ds) {
  Hid space(H5Dget_space(ds), H5Sclose);
  const int rank = H5Sget_simple_extent_ndims(space);
  std::vector<hsize_t> dims(static_cast<size_t>(rank));
  H5Sget_simple_extent_dims(space, dims.data(), nullptr);
  return dims;
}

// Reads a complex dataset stored either as a two-member compound (any member
// names; first = real, second = imag) or as a real array with a trailing
// dimension of 2. Returns the logical dims (compound layout's dims, or the
// real layout's dims without the trailing 2).
std::vector<hsize_t> read_complex(hid_t file, const std::string& name, std::vector<Cx>& out) {
  Hid ds(H5Dopen2(file, name.c_str(), H5P_DEFAULT), H5Dclose);
  if (!ds.ok()) fail_data("missing entry: dataset '" + name + "' not found in container");
  Hid ftype(H5Dget_type(ds), H5Tclose);
  std::vector<hsize_t> dims = dataset_dims(ds);
  hsize_t total = 1;
  for (hsize_t d : dims) total *= d;

  const H5T_class_t cls = H5Tget_class(ftype);
  if (cls == H5T_COMPOUND) {
    if (H5Tget_nmembers(ftype) != 2) fail_data("dataset '" + name + "': expected a 2-member complex compound");
    char* n0 = H5Tget_member_name(ftype, 0);
    char* n1 = H5Tget_member_name(ftype, 1);
    Hid mem(H5Tcreate(H5T_COMPOUND, 2 * sizeof(double)), H5Tclose);
    H5Tinsert(mem, n0, 0, H5T_NATIVE_DOUBLE);
    H5Tinsert(mem, n1, sizeof(double), H5T_NATIVE_DOUBLE);
    H5free_memory(n0);
    H5free_memory(n1);
    out.resize(total);
    if (H5Dread(ds, mem, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data()) < 0) {
      fail_io("read failed for dataset: " + name);
    }
    return dims;
  }
  if (cls == H5T_FLOAT) {
    if (dims.empty() || dims.back() != 2) {
      fail_data("dataset '" + name + "': not complex (expected compound or trailing (real, imag) pair)");
    }
    out.resize(total / 2);
    if (H5Dread(ds, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data()) < 0) {
      fail_io("read failed for dataset: " + name);
    }
    dims.pop_back();
    return dims;
  }
  fail_data("dataset '" + name + "': unsupported type class for complex data");
}

std::vector<hsize_t> read_real(hid_t file, const std::string& name, std::vector<double>& out) {
  Hid ds(H5Dopen2(file, name.c_str(), H5P_DEFAULT), H5Dclose);
  if (!ds.ok()) fail_data("missing entry: dataset '" + name + "' not found in container");
  std::vector<hsize_t> dims = dataset_dims(ds);
  hsize_t total = 1;
  for (hsize_t d : dims) total *= d;
  out.resize(total);
  if (H5Dread(ds, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data()) < 0) {
    fail_io("read failed for dataset: " + name);
  }
  return dims;
}

}  // namespace

KSpaceDataset read_dataset(const std::string& path, const DatasetNames& names) {
  Hid file = open_file(path);
  KSpaceDataset d;

  // rawdata: [1, Readout, Spokes, Channels] (leading singleton optional).
  {
    std::vector<Cx> buf;
    std::vector<hsize_t> dims = read_complex(file, names.rawdata, buf);
    if (dims.size() == 4 && dims[0] == 1) dims.erase(dims.begin());
    if (dims.size() != 3) fail_data("rawdata: expected dims [1, read, spokes, coils]");
    const index_t nr = static_cast<index_t>(dims[0]);
    const index_t ns = static_cast<index_t>(dims[1]);
    const index_t nc = static_cast<index_t>(dims[2]);
    d.samples = Array3D<Cx>(nc, ns, nr);
    for (index_t r = 0; r < nr; ++r) {
      for (index_t s = 0; s < ns; ++s) {
        for (index_t c = 0; c < nc; ++c) {
          d.samples(c, s, r) = buf[static_cast<size_t>((r * ns + s) * nc + c)];
        }
      }
    }
  }

  // trajectory: [3, Readout, Spokes].
  {
    std::vector<double> buf;
    std::vector<hsize_t> dims = read_real(file, names.trajectory, buf);
    if (dims.size() != 3 || dims[0] != 3) fail_data("trajectory: expected dims [3, read, spokes]");
    const index_t nr = static_cast<index_t>(dims[1]);
    const index_t ns = static_cast<index_t>(dims[2]);
    d.trajectory = Array3D<double>(3, ns, nr);
    for (index_t a = 0; a < 3; ++a) {
      for (index_t r = 0; r < nr; ++r) {
        for (index_t s = 0; s < ns; ++s) {
          d.trajectory(a, s, r) = buf[static_cast<size_t>((a * nr + r) * ns + s)];
        }
      }
    }
  }

  if (dataset_exists(file, names.sensitivities)) {
    std::vector<Cx> buf;
    std::vector<hsize_t> dims = read_complex(file, names.sensitivities, buf);
    if (dims.size() != 3) fail_data("sensitivities: expected dims [coils, rows, cols]");
    Array3D<Cx> s(static_cast<index_t>(dims[0]), static_cast<index_t>(dims[1]), static_cast<index_t>(dims[2]));
    std::copy(buf.begin(), buf.end(), s.data());
    d.sensitivities = std::move(s);
  }

  if (dataset_exists(file, names.noise_covariance)) {
    std::vector<Cx> buf;
    std::vector<hsize_t> dims = read_complex(file, names.noise_covariance, buf);
    if (dims.size() != 2 || dims[0] != dims[1]) fail_data("noise_covariance: expected square [coils, coils]");
    Array2D<Cx> c(static_cast<index_t>(dims[0]), static_cast<index_t>(dims[1]));
    std::copy(buf.begin(), buf.end(), c.data());
    d.noise_covariance = std::move(c);
  }

  return d;
}

void write_dataset(const std::string& path, const KSpaceDataset& dataset, const DatasetNames& names) {
  ValidationReport rep = validate_dataset(dataset);
  if (!rep.ok()) fail_data("write_dataset: " + rep.joined());

  Hid file = create_file(path);
  const index_t nc = dataset.n_coils(), ns = dataset.n_spokes(), nr = dataset.n_read();

  {
    std::vector<Cx> buf(static_cast<size_t>(nc * ns * nr));
    for (index_t r = 0; r < nr; ++r) {
      for (index_t s = 0; s < ns; ++s) {
        for (index_t c = 0; c < nc; ++c) {
          buf[static_cast<size_t>((r * ns + s) * nc + c)] = dataset.samples(c, s, r);
        }
      }
    }
    write_complex(file, names.rawdata,
                  {1, static_cast<hsize_t>(nr), static_cast<hsize_t>(ns), static_cast<hsize_t>(nc)}, buf.data());
  }

  {
    std::vector<double> buf(static_cast<size_t>(3 * ns * nr));
    for (index_t a = 0; a < 3; ++a) {
      for (index_t r = 0; r < nr; ++r) {
        for (index_t s = 0; s < ns; ++s) {
          buf[static_cast<size_t>((a * nr + r) * ns + s)] = dataset.trajectory(a, s, r);
        }
      }
    }
    write_real(file, names.trajectory, {3, static_cast<hsize_t>(nr), static_cast<hsize_t>(ns)}, buf.data());
  }

  if (dataset.sensitivities) {
    const auto& s = *dataset.sensitivities;
    write_complex(file, names.sensitivities,
                  {static_cast<hsize_t>(s.dim0()), static_cast<hsize_t>(s.dim1()), static_cast<hsize_t>(s.dim2())},
                  s.data());
  }
  if (dataset.noise_covariance) {
    const auto& c = *dataset.noise_covariance;
    write_complex(file, names.noise_covariance,
                  {static_cast<hsize_t>(c.rows()), static_cast<hsize_t>(c.cols())}, c.data());
  }
}

void write_image_files(const Image& image, const std::string& path_stem) {
  for (const Cx& v : image.flat()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      fail_data("write_image_files: non-finite pixel values");
    }
  }
  {
    Hid file = create_file(path_stem + ".h5");
    write_complex(file, "image", {static_cast<hsize_t>(image.rows()), static_cast<hsize_t>(image.cols())},
                  image.data());
  }
  Array2D<double> mag(image.rows(), image.cols());
  for (index_t i = 0; i < image.size(); ++i) mag.data()[i] = std::abs(image.data()[i]);
  const Array2D<uint8_t> gray = window_to_gray(mag);
  write_pgm(gray, path_stem + ".pgm");
  write_png(gray, path_stem + ".png");
}

Image read_image(const std::string& path) {
  Hid file = open_file(path);
  std::vector<Cx> buf;
  std::vector<hsize_t> dims = read_complex(file, "image", buf);
  if (dims.size() != 2) fail_data("image dataset must be 2-dimensional");
  Image img(static_cast<index_t>(dims[0]), static_cast<index_t>(dims[1]));
  std::copy(buf.begin(), buf.end(), img.data());
  return img;
}

Array2D<uint8_t> window_to_gray(const Array2D<double>& values) {
  double lo = 1e300, hi = -1e300;
  for (double v : values.flat()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Array2D<uint8_t> gray(values.rows(), values.cols());
  if (!(hi > lo)) {
    for (auto& g : gray.flat()) g = 128;  // degenerate window: mid-gray
    return gray;
  }
  const double scale = 255.0 / (hi - lo);
  for (index_t i = 0; i < values.size(); ++i) {
    gray.data()[i] = static_cast<uint8_t>(std::lround((values.data()[i] - lo) * scale));
  }
  return gray;
}

void write_pgm(const Array2D<uint8_t>& gray, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_io("cannot write: " + path);
  f << "P5\n" << gray.cols() << " " << gray.rows() << "\n255\n";
  f.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
  if (!f) fail_io("short write: " + path);
}

void write_png(const Array2D<uint8_t>& gray, const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) fail_io("cannot write: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    fail_io("png encoder failed for: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(gray.cols()), static_cast<png_uint_32>(gray.rows()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (index_t r = 0; r < gray.rows(); ++r) {
    png_write_row(png, const_cast<png_bytep>(gray.row(r)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_real_array(const std::string& path, const std::string& name, const Array2D<double>& values) {
  Hid file = create_file(path);
  write_real(file, name, {static_cast<hsize_t>(values.rows()), static_cast<hsize_t>(values.cols())}, values.data());
}

Array2D<double> read_real_array(const std::string& path, const std::string& name) {
  Hid file = open_file(path);
  std::vector<double> buf;
  std::vector<hsize_t> dims = read_real(file, name, buf);
  if (dims.size() != 2) fail_data("array dataset must be 2-dimensional");
  Array2D<double> out(static_cast<index_t>(dims[0]), static_cast<index_t>(dims[1]));
  std::copy(buf.begin(), buf.end(), out.data());
  return out;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "max_iterations",        "tikhonov_lambda",      "tolerance_epsilon",
    "kernel_width",          "kernel_table_points",  "kernel_lookup",
    "oversampling_ratio_override", "sensitivity_window_width", "sensitivity_source",
    "mask_threshold",        "dcf_method",           "filter",
    "undersampling",         "dataset_names",        "output_dir",
    "seed",                  "threads",              "store_iterates",
    "check_operator"};

FilterSpec parse_filter(const json& j) {
  FilterSpec f;
  const std::string kind = j.value("kind", "hard_circle");
  const std::string unit = j.value("k_c_unit", "grid_cells");
  FilterSpec::Unit u = FilterSpec::Unit::grid_cells;
  if (unit == "fraction_half_fov") u = FilterSpec::Unit::fraction_half_fov;
  else if (unit != "grid_cells") fail_data("config: unknown k_c_unit '" + unit + "'");
  if (kind == "none") return FilterSpec::none();
  if (kind == "arctan") {
    if (!j.contains("k_c")) fail_data("config: arctan filter requires k_c");
    return FilterSpec::arctan(j.at("k_c").get<double>(), u, j.value("beta", 100.0));
  }
  if (kind == "hard_circle") {
    if (!j.contains("k_c")) fail_data("config: explicit hard_circle filter requires k_c");
    return FilterSpec::hard_circle(j.at("k_c").get<double>(), u);
  }
  fail_data("config: unknown filter kind '" + kind + "'");
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail_data(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail_data("config: top level must be a JSON object");

  RunConfig cfg;
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) cfg.warnings.push_back("config: unknown key '" + key + "' ignored");
  }

  auto& r = cfg.recon;
  r.max_iterations = j.value("max_iterations", 10);
  if (r.max_iterations < 1) fail_data("config: max_iterations must be >= 1");
  r.lambda = j.value("tikhonov_lambda", 0.0);
  if (r.lambda < 0.0) fail_data("config: tikhonov_lambda must be >= 0");
  r.tolerance_epsilon = j.value("tolerance_epsilon", 0.0);
  if (r.tolerance_epsilon < 0.0) fail_data("config: tolerance_epsilon must be >= 0");
  r.kernel_width = j.value("kernel_width", 5);
  if (r.kernel_width < 2) fail_data("config: kernel_width must be >= 2");
  r.kernel_table_points = j.value("kernel_table_points", 10000);
  if (r.kernel_table_points < 100) fail_data("config: kernel_table_points must be >= 100");
  const std::string lookup = j.value("kernel_lookup", "linear");
  if (lookup == "linear") r.kernel_lookup = GriddingKernel::Lookup::linear;
  else if (lookup == "nearest") r.kernel_lookup = GriddingKernel::Lookup::nearest;
  else fail_data("config: kernel_lookup must be 'linear' or 'nearest'");
  if (j.contains("oversampling_ratio_override") && !j.at("oversampling_ratio_override").is_null()) {
    r.oversampling_ratio_override = j.at("oversampling_ratio_override").get<double>();
    if (*r.oversampling_ratio_override < 1.0) fail_data("config: oversampling_ratio_override must be >= 1");
  }
  r.sensitivity_window_width = j.value("sensitivity_window_width", 50);
  if (r.sensitivity_window_width < 2) fail_data("config: sensitivity_window_width must be >= 2");
  r.mask_threshold = j.value("mask_threshold", 0.1);
  const std::string src = j.value("sensitivity_source", "auto");
  if (src == "auto") r.sensitivity_source = ReconOptions::SensitivitySource::auto_detect;
  else if (src == "sos") r.sensitivity_source = ReconOptions::SensitivitySource::sos;
  else if (src == "file") r.sensitivity_source = ReconOptions::SensitivitySource::file;
  else fail_data("config: sensitivity_source must be auto|sos|file");
  const std::string dcf = j.value("dcf_method", "gridded_ones");
  if (dcf == "gridded_ones") r.dcf_method = ReconOptions::DcfMethod::gridded_ones;
  else if (dcf == "ramp") r.dcf_method = ReconOptions::DcfMethod::ramp;
  else fail_data("config: dcf_method must be gridded_ones|ramp");
  if (j.contains("filter")) r.filter = parse_filter(j.at("filter"));
  r.store_iterates = j.value("store_iterates", false);
  r.check_operator = j.value("check_operator", true);
  r.threads = j.value("threads", 0);

  if (j.contains("undersampling")) {
    const json& u = j.at("undersampling");
    cfg.undersampling.scheme = u.value("scheme", "none");
    if (cfg.undersampling.scheme != "none" && cfg.undersampling.scheme != "skip" &&
        cfg.undersampling.scheme != "first") {
      fail_data("config: undersampling scheme must be none|skip|first");
    }
    if (u.contains("values")) {
      for (const auto& v : u.at("values")) cfg.undersampling.values.push_back(v.get<index_t>());
    }
  }
  if (j.contains("dataset_names")) {
    const json& names = j.at("dataset_names");
    cfg.dataset_names.rawdata = names.value("rawdata", cfg.dataset_names.rawdata);
    cfg.dataset_names.trajectory = names.value("trajectory", cfg.dataset_names.trajectory);
    cfg.dataset_names.sensitivities = names.value("sensitivities", cfg.dataset_names.sensitivities);
    cfg.dataset_names.noise_covariance = names.value("noise_covariance", cfg.dataset_names.noise_covariance);
  }
  cfg.output_dir = j.value("output_dir", ".");
  cfg.seed = j.value("seed", static_cast<uint64_t>(1234));
  return cfg;
}

RunConfig read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail_io("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_config_json(text);
}

}  // namespace cgsense
