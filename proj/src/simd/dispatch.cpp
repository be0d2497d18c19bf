#include <cstdlib>
#include <string_view>

#include "lsbw/simd.hpp"

namespace lsbw::simd {

bool avx2_supported() {
#if defined(LSBW_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("LSBW_SIMD")) {
    if (std::string_view(env) == "scalar") return scalar_table();
  }
  return avx2_supported() ? avx2_table() : scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace lsbw::simd
