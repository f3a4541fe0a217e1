#include <cstdlib>
#include <string_view>

#include "higa/kernels.hpp"
#include "kernels_internal.hpp"

namespace higa::kernels {

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", scalar::gemm_tn_acc, scalar::dot, scalar::axpy, scalar::csr_matvec};
  return table;
}

const KernelTable* avx2_table() {
#if defined(HIGA_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  static const KernelTable table{"avx2", avx2::gemm_tn_acc, avx2::dot, avx2::axpy, avx2::csr_matvec};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("HIGA_FORCE_SCALAR");
    const bool force_scalar = env != nullptr && *env != '\0' && std::string_view(env) != "0";
    const KernelTable* fast = avx2_table();
    return (force_scalar || fast == nullptr) ? &scalar_table() : fast;
  }();
  return *chosen;
}

}  // namespace higa::kernels
