// SPDX-License-Identifier: Apache-2.0
#include "arpvc/kernels.hpp"

#include <cstdlib>

namespace arpvc::kern {

namespace {

void axpy_f32_scalar(float* dst, const float* src, float a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

float dot_f32_scalar(const float* a, const float* b, std::size_t n) {
  float s = 0.0f;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy3_f32_scalar(float* dst, const float* s, float a0, float a1, float a2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a0 * s[i] + a1 * s[i + 1] + a2 * s[i + 2];
}

void dot3_f32_scalar(const float* a, const float* b, std::size_t n, float out[3]) {
  float s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s0 += a[i] * b[i];
    s1 += a[i] * b[i + 1];
    s2 += a[i] * b[i + 2];
  }
  out[0] += s0;
  out[1] += s1;
  out[2] += s2;
}

std::uint32_t sad_u8_scalar(const std::uint8_t* a, std::ptrdiff_t stride_a,
                            const std::uint8_t* b, std::ptrdiff_t stride_b,
                            int w, int h) {
  std::uint32_t acc = 0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* pa = a + y * stride_a;
    const std::uint8_t* pb = b + y * stride_b;
    for (int x = 0; x < w; ++x) acc += static_cast<std::uint32_t>(std::abs(int(pa[x]) - int(pb[x])));
  }
  return acc;
}

std::uint64_t sse_u8_scalar(const std::uint8_t* a, std::ptrdiff_t stride_a,
                            const std::uint8_t* b, std::ptrdiff_t stride_b,
                            int w, int h) {
  std::uint64_t acc = 0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* pa = a + y * stride_a;
    const std::uint8_t* pb = b + y * stride_b;
    for (int x = 0; x < w; ++x) {
      int d = int(pa[x]) - int(pb[x]);
      acc += static_cast<std::uint64_t>(d * d);
    }
  }
  return acc;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar",          axpy_f32_scalar, dot_f32_scalar, axpy3_f32_scalar,
                       dot3_f32_scalar,   sad_u8_scalar,   sse_u8_scalar};
  return ops;
}

}  // namespace arpvc::kern
