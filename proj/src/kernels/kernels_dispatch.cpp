// SPDX-License-Identifier: Apache-2.0
#include "arpvc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace arpvc::kern {

bool avx2_compiled() {
#if defined(ARPVC_HAVE_AVX2)
  return true;
#else
  return false;
#endif
}

bool avx2_available() {
#if defined(ARPVC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(ARPVC_HAVE_AVX2)
// Keep the symbol linkable on targets without the AVX2 translation unit.
const Ops& avx2_ops() { return scalar_ops(); }
#endif

namespace {

const Ops* select() {
  const char* env = std::getenv("ARPVC_ISA");
  if (env) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
#if defined(ARPVC_HAVE_AVX2)
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return &avx2_ops();
#endif
  }
#if defined(ARPVC_HAVE_AVX2)
  if (avx2_available()) return &avx2_ops();
#endif
  return &scalar_ops();
}

std::atomic<const Ops*> g_forced{nullptr};

}  // namespace

const Ops& active() {
  const Ops* forced = g_forced.load(std::memory_order_acquire);
  if (forced) return *forced;
  static const Ops* auto_selected = select();
  return *auto_selected;
}

void force(const Ops& ops) { g_forced.store(&ops, std::memory_order_release); }
void reset() { g_forced.store(nullptr, std::memory_order_release); }

}  // namespace arpvc::kern
