#include "cgsense/simd_kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cgsense::kernels {

namespace {
const Ops& select() {
  const char* env = std::getenv("CGSENSE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_ops();
  const Ops* v = avx2_ops();
  if (env && std::strcmp(env, "avx2") == 0) return v ? *v : scalar_ops();
  return v ? *v : scalar_ops();
}
}  // namespace

const Ops& active() {
  static const Ops& chosen = select();
  return chosen;
}

}  // namespace cgsense::kernels
