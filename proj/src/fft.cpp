#include "cgsense/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "cgsense/errors.hpp"

namespace cgsense {
namespace {

// FFTW_ESTIMATE keeps planning deterministic; FFTW_UNALIGNED lets one plan
// serve any buffer. Planning is serialized (FFTW requirement); execution via
// fftw_execute_dft is thread-safe.
class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan get(int rank, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::tuple{rank, n, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Cx> dummy(static_cast<size_t>(rank == 2 ? n * n : n));
    fftw_complex* p = reinterpret_cast<fftw_complex*>(dummy.data());
    fftw_plan plan = rank == 2 ? fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                               : fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) fail_numeric("fft: planner failed for size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// For even n the half-grid circular shift is its own inverse, so fftshift and
// ifftshift coincide.
void shift_half_2d(Array2D<Cx>& a) {
  const index_t n = a.rows(), h = n / 2;
  for (index_t r = 0; r < h; ++r) {
    Cx* top = a.row(r);
    Cx* bot = a.row(r + h);
    for (index_t c = 0; c < h; ++c) {
      std::swap(top[c], bot[c + h]);
      std::swap(top[c + h], bot[c]);
    }
  }
}

void shift_half_1d(std::vector<Cx>& v) {
  const size_t h = v.size() / 2;
  for (size_t i = 0; i < h; ++i) std::swap(v[i], v[i + h]);
}

Array2D<Cx> transform_2d(const Array2D<Cx>& in, int sign) {
  if (in.rows() != in.cols()) fail_data("fft: image must be square");
  if (in.rows() < 2 || in.rows() % 2 != 0) fail_data("fft: size must be even, got " + std::to_string(in.rows()));
  const int n = static_cast<int>(in.rows());
  Array2D<Cx> buf = in;
  shift_half_2d(buf);
  fftw_plan plan = PlanCache::instance().get(2, n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()), reinterpret_cast<fftw_complex*>(buf.data()));
  shift_half_2d(buf);
  const double scale = 1.0 / static_cast<double>(n);
  for (Cx& v : buf.flat()) v *= scale;
  return buf;
}

std::vector<Cx> transform_1d(const std::vector<Cx>& in, int sign) {
  if (in.size() < 2 || in.size() % 2 != 0) fail_data("fft: 1d size must be even");
  const int n = static_cast<int>(in.size());
  std::vector<Cx> buf = in;
  shift_half_1d(buf);
  fftw_plan plan = PlanCache::instance().get(1, n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()), reinterpret_cast<fftw_complex*>(buf.data()));
  shift_half_1d(buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Cx& v : buf) v *= scale;
  return buf;
}

}  // namespace

Array2D<Cx> fft_centered(const Array2D<Cx>& image) { return transform_2d(image, FFTW_FORWARD); }
Array2D<Cx> ifft_centered(const Array2D<Cx>& kspace) { return transform_2d(kspace, FFTW_BACKWARD); }
std::vector<Cx> fft_centered_1d(const std::vector<Cx>& x) { return transform_1d(x, FFTW_FORWARD); }
std::vector<Cx> ifft_centered_1d(const std::vector<Cx>& x) { return transform_1d(x, FFTW_BACKWARD); }

}  // namespace cgsense
