#include <atomic>
#include <cstdlib>
#include <string>

#include "ymflow/error.hpp"
#include "ymflow/kernels.hpp"

namespace ymflow::kernels {

#if defined(YMFLOW_HAVE_AVX2)
const KernelSet* avx2_kernels_compiled();
#endif

const KernelSet* avx2_kernels() {
#if defined(YMFLOW_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_kernels_compiled() : nullptr;
#else
  return nullptr;
#endif
}

namespace {
const KernelSet* pick(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") {
    if (const KernelSet* k = avx2_kernels()) return k;
    throw Error("avx2 kernels unavailable on this build or CPU");
  }
  if (name == "auto" || name.empty()) {
    if (const KernelSet* k = avx2_kernels()) return k;
    return &scalar_kernels();
  }
  throw Error("unknown kernel set '" + std::string(name) + "'");
}

std::atomic<const KernelSet*>& current() {
  static std::atomic<const KernelSet*> k{[] {
    const char* env = std::getenv("YMFLOW_KERNELS");
    return pick(env ? env : "auto");
  }()};
  return k;
}
}  // namespace

const KernelSet& active_kernels() { return *current().load(); }

void select_kernels(std::string_view name) { current().store(pick(name)); }

}  // namespace ymflow::kernels
