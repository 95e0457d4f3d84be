#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "kernels_internal.hpp"

namespace needlets::simd {

std::string to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> isa_from_string(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(NEEDLETS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(NEEDLETS_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelSet& kernels(Isa isa) {
  if (!isa_supported(isa)) throw std::runtime_error("kernel set '" + to_string(isa) + "' not available on this machine");
  switch (isa) {
#if defined(NEEDLETS_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_kernels();
#endif
#if defined(NEEDLETS_HAVE_NEON)
    case Isa::neon: return detail::neon_kernels();
#endif
    default: return detail::scalar_kernels();
  }
}

namespace {

const KernelSet* initial_selection() {
  if (const char* env = std::getenv("NEEDLETS_ISA")) {
    if (auto isa = isa_from_string(env); isa && isa_supported(*isa)) return &kernels(*isa);
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) return &kernels(isa);
  }
  return &detail::scalar_kernels();
}

std::atomic<const KernelSet*>& selection() {
  static std::atomic<const KernelSet*> current{initial_selection()};
  return current;
}

}  // namespace

const KernelSet& active_kernels() { return *selection().load(std::memory_order_acquire); }

void select_isa(Isa isa) { selection().store(&kernels(isa), std::memory_order_release); }

}  // namespace needlets::simd
