#include <cstdlib>
#include <cstring>

#include "csr/kernels.hpp"

namespace csr::kernels {

#if defined(CSR_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels();
#endif

const KernelTable* avx2_table() {
#if defined(CSR_HAVE_AVX2_KERNELS)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* force = std::getenv("CSR_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0) return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace csr::kernels
