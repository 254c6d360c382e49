#include <cstdlib>
#include <string_view>

#include "nlhelm/kernels.hpp"

namespace nlhelm::kernels {

const KernelTable* avx2_table_impl();

namespace {

bool cpu_has_avx2_fma() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa select_isa() {
  if (const char* env = std::getenv("NLHELM_SIMD"); env && std::string_view(env) == "scalar") {
    return Isa::scalar;
  }
  return avx2_table() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable* table = cpu_has_avx2_fma() ? avx2_table_impl() : nullptr;
  return table;
}

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& table = active_isa() == Isa::avx2 ? *avx2_table() : scalar_table();
  return table;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace nlhelm::kernels
