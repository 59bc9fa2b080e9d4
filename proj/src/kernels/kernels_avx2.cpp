// SPDX-License-Identifier: Apache-2.0
#include "arpvc/kernels.hpp"

#if !defined(__AVX2__) || !defined(__FMA__)
#error "this file must be compiled with -mavx2 -mfma"
#endif

#include <immintrin.h>

namespace arpvc::kern {

namespace {

void axpy_f32_avx2(float* dst, const float* src, float a, std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m256 d0 = _mm256_loadu_ps(dst + i);
    __m256 d1 = _mm256_loadu_ps(dst + i + 8);
    d0 = _mm256_fmadd_ps(va, _mm256_loadu_ps(src + i), d0);
    d1 = _mm256_fmadd_ps(va, _mm256_loadu_ps(src + i + 8), d1);
    _mm256_storeu_ps(dst + i, d0);
    _mm256_storeu_ps(dst + i + 8, d1);
  }
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_loadu_ps(dst + i);
    d = _mm256_fmadd_ps(va, _mm256_loadu_ps(src + i), d);
    _mm256_storeu_ps(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a * src[i];
}

float dot_f32_avx2(const float* a, const float* b, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8)
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  acc0 = _mm256_add_ps(acc0, acc1);
  __m128 lo = _mm256_castps256_ps128(acc0);
  __m128 hi = _mm256_extractf128_ps(acc0, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
  float s = _mm_cvtss_f32(lo);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy3_f32_avx2(float* dst, const float* s, float a0, float a1, float a2, std::size_t n) {
  const __m256 v0 = _mm256_set1_ps(a0);
  const __m256 v1 = _mm256_set1_ps(a1);
  const __m256 v2 = _mm256_set1_ps(a2);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_loadu_ps(dst + i);
    d = _mm256_fmadd_ps(v0, _mm256_loadu_ps(s + i), d);
    d = _mm256_fmadd_ps(v1, _mm256_loadu_ps(s + i + 1), d);
    d = _mm256_fmadd_ps(v2, _mm256_loadu_ps(s + i + 2), d);
    _mm256_storeu_ps(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a0 * s[i] + a1 * s[i + 1] + a2 * s[i + 2];
}

void dot3_f32_avx2(const float* a, const float* b, std::size_t n, float out[3]) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  __m256 acc2 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    acc0 = _mm256_fmadd_ps(va, _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(va, _mm256_loadu_ps(b + i + 1), acc1);
    acc2 = _mm256_fmadd_ps(va, _mm256_loadu_ps(b + i + 2), acc2);
  }
  const auto hsum = [](__m256 v) {
    __m128 lo = _mm_add_ps(_mm256_castps256_ps128(v), _mm256_extractf128_ps(v, 1));
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
    return _mm_cvtss_f32(lo);
  };
  float s0 = hsum(acc0), s1 = hsum(acc1), s2 = hsum(acc2);
  for (; i < n; ++i) {
    s0 += a[i] * b[i];
    s1 += a[i] * b[i + 1];
    s2 += a[i] * b[i + 2];
  }
  out[0] += s0;
  out[1] += s1;
  out[2] += s2;
}

std::uint32_t sad_u8_avx2(const std::uint8_t* a, std::ptrdiff_t stride_a,
                          const std::uint8_t* b, std::ptrdiff_t stride_b,
                          int w, int h) {
  __m128i acc = _mm_setzero_si128();
  std::uint32_t tail = 0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* pa = a + y * stride_a;
    const std::uint8_t* pb = b + y * stride_b;
    int x = 0;
    for (; x + 16 <= w; x += 16) {
      __m128i va = _mm_loadu_si128(reinterpret_cast<const __m128i*>(pa + x));
      __m128i vb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(pb + x));
      acc = _mm_add_epi64(acc, _mm_sad_epu8(va, vb));
    }
    if (x + 8 <= w) {
      __m128i va = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(pa + x));
      __m128i vb = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(pb + x));
      acc = _mm_add_epi64(acc, _mm_sad_epu8(va, vb));
      x += 8;
    }
    for (; x < w; ++x) tail += static_cast<std::uint32_t>(pa[x] > pb[x] ? pa[x] - pb[x] : pb[x] - pa[x]);
  }
  return static_cast<std::uint32_t>(_mm_cvtsi128_si64(acc)) +
         static_cast<std::uint32_t>(_mm_extract_epi64(acc, 1)) + tail;
}

std::uint64_t sse_u8_avx2(const std::uint8_t* a, std::ptrdiff_t stride_a,
                          const std::uint8_t* b, std::ptrdiff_t stride_b,
                          int w, int h) {
  std::uint64_t total = 0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* pa = a + y * stride_a;
    const std::uint8_t* pb = b + y * stride_b;
    __m256i acc = _mm256_setzero_si256();
    int x = 0;
    for (; x + 16 <= w; x += 16) {
      __m256i va = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(pa + x)));
      __m256i vb = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(pb + x)));
      __m256i d = _mm256_sub_epi16(va, vb);
      acc = _mm256_add_epi32(acc, _mm256_madd_epi16(d, d));
    }
    __m128i s = _mm_add_epi32(_mm256_castsi256_si128(acc), _mm256_extracti128_si256(acc, 1));
    s = _mm_add_epi32(s, _mm_shuffle_epi32(s, _MM_SHUFFLE(1, 0, 3, 2)));
    s = _mm_add_epi32(s, _mm_shuffle_epi32(s, _MM_SHUFFLE(2, 3, 0, 1)));
    total += static_cast<std::uint32_t>(_mm_cvtsi128_si32(s));
    for (; x < w; ++x) {
      int d = int(pa[x]) - int(pb[x]);
      total += static_cast<std::uint64_t>(d * d);
    }
  }
  return total;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2",         axpy_f32_avx2, dot_f32_avx2, axpy3_f32_avx2,
                       dot3_f32_avx2,  sad_u8_avx2,   sse_u8_avx2};
  return ops;
}

}  // namespace arpvc::kern
