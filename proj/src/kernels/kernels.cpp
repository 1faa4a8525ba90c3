// Runtime selection of the kernel variant.

#include "rdsim/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rdsim::kernels {

#ifdef RDSIM_HAVE_AVX2
const Ops* avx2_ops_table();  // defined in the AVX2 translation unit
#endif

bool avx2_available() {
#ifdef RDSIM_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* avx2_ops() {
#ifdef RDSIM_HAVE_AVX2
  if (avx2_available()) return avx2_ops_table();
#endif
  return nullptr;
}

const Ops& active() {
  static const Ops& chosen = []() -> const Ops& {
    if (const char* env = std::getenv("RDSIM_KERNELS")) {
      const std::string want(env);
      if (want == "scalar") return scalar_ops();
      if (want == "avx2") {
        if (const Ops* v = avx2_ops()) return *v;
        throw std::runtime_error(
            "ERROR: RDSIM_KERNELS=avx2 requested but AVX2+FMA is not available on this host");
      }
      throw std::runtime_error("ERROR: unknown RDSIM_KERNELS value '" + want +
                               "' (expected 'scalar' or 'avx2')");
    }
    if (const Ops* v = avx2_ops()) return *v;
    return scalar_ops();
  }();
  return chosen;
}

}  // namespace rdsim::kernels
