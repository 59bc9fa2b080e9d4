// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

namespace arpvc::kern {

/// Hot inner loops behind one dispatch table. The scalar table is the
/// reference implementation; SIMD variants must agree with it exactly for
/// the integer kernels and within accumulation rounding for the float
/// reductions (see tests/test_kernels.cpp).
struct Ops {
  const char* name;
  void (*axpy_f32)(float* dst, const float* src, float a, std::size_t n);
  float (*dot_f32)(const float* a, const float* b, std::size_t n);
  /// dst[i] += a0*s[i] + a1*s[i+1] + a2*s[i+2]: one row of a 3-tap
  /// convolution, fused so dst is loaded and stored once.
  void (*axpy3_f32)(float* dst, const float* s, float a0, float a1, float a2, std::size_t n);
  /// out[k] += sum_i a[i] * b[i+k] for k = 0,1,2: the three kernel-tap dot
  /// products of a row, sharing one pass over a.
  void (*dot3_f32)(const float* a, const float* b, std::size_t n, float out[3]);
  std::uint32_t (*sad_u8)(const std::uint8_t* a, std::ptrdiff_t stride_a,
                          const std::uint8_t* b, std::ptrdiff_t stride_b,
                          int w, int h);
  std::uint64_t (*sse_u8)(const std::uint8_t* a, std::ptrdiff_t stride_a,
                          const std::uint8_t* b, std::ptrdiff_t stride_b,
                          int w, int h);
};

const Ops& scalar_ops();
bool avx2_compiled();
bool avx2_available();
const Ops& avx2_ops();  // only valid when avx2_compiled() && avx2_available()

/// Active table. Selected once on first use: ARPVC_ISA=scalar|avx2 wins,
/// otherwise the widest supported variant.
const Ops& active();

/// Test hooks. force() pins a table, reset() returns to auto selection.
void force(const Ops& ops);
void reset();

// Typed helpers so templated numerics code picks up the dispatched float
// kernels and plain loops for double (the gradient-check precision).
template <typename T>
inline void axpy(T* dst, const T* src, T a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}
template <>
inline void axpy<float>(float* dst, const float* src, float a, std::size_t n) {
  active().axpy_f32(dst, src, a, n);
}

template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) {
  T s{};
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}
template <>
inline float dot<float>(const float* a, const float* b, std::size_t n) {
  return active().dot_f32(a, b, n);
}

template <typename T>
inline void axpy3(T* dst, const T* s, T a0, T a1, T a2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a0 * s[i] + a1 * s[i + 1] + a2 * s[i + 2];
}
template <>
inline void axpy3<float>(float* dst, const float* s, float a0, float a1, float a2,
                         std::size_t n) {
  active().axpy3_f32(dst, s, a0, a1, a2, n);
}

template <typename T>
inline void dot3(const T* a, const T* b, std::size_t n, T out[3]) {
  T s0{}, s1{}, s2{};
  for (std::size_t i = 0; i < n; ++i) {
    s0 += a[i] * b[i];
    s1 += a[i] * b[i + 1];
    s2 += a[i] * b[i + 2];
  }
  out[0] += s0;
  out[1] += s1;
  out[2] += s2;
}
template <>
inline void dot3<float>(const float* a, const float* b, std::size_t n, float out[3]) {
  active().dot3_f32(a, b, n, out);
}

inline std::uint32_t sad(const std::uint8_t* a, std::ptrdiff_t stride_a,
                         const std::uint8_t* b, std::ptrdiff_t stride_b,
                         int w, int h) {
  return active().sad_u8(a, stride_a, b, stride_b, w, h);
}
inline std::uint64_t sse(const std::uint8_t* a, std::ptrdiff_t stride_a,
                         const std::uint8_t* b, std::ptrdiff_t stride_b,
                         int w, int h) {
  return active().sse_u8(a, stride_a, b, stride_b, w, h);
}

}  // namespace arpvc::kern
