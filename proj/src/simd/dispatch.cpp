#include <atomic>

#include "cnpcurv/simd/kernels.hpp"

namespace cnpcurv::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

namespace {

std::atomic<bool> g_forced{false};

const KernelSet& best() {
  static const KernelSet* chosen = [] {
    if (const KernelSet* k = avx2_kernels()) return k;
    if (const KernelSet* k = neon_kernels()) return k;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace

const KernelSet& active() { return g_forced.load(std::memory_order_relaxed) ? scalar_kernels() : best(); }

void force_scalar(bool on) { g_forced.store(on, std::memory_order_relaxed); }

bool scalar_forced() { return g_forced.load(std::memory_order_relaxed); }

}  // namespace cnpcurv::simd
