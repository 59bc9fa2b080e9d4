// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "arpvc/kernels.hpp"

using namespace arpvc;

namespace {
struct KernReset {
  ~KernReset() { kern::reset(); }
};
}  // namespace

TEST_CASE("dispatch honors force and reset") {
  KernReset guard;
  kern::force(kern::scalar_ops());
  CHECK(std::string(kern::active().name) == "scalar");
  kern::reset();
  CHECK(kern::active().name != nullptr);
}

TEST_CASE("avx2 variants match the scalar reference") {
  if (!kern::avx2_compiled() || !kern::avx2_available()) {
    MESSAGE("avx2 not available; equivalence checked on scalar only");
    return;
  }
  const kern::Ops& s = kern::scalar_ops();
  const kern::Ops& v = kern::avx2_ops();
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> dist(-3.0f, 3.0f);
  std::uniform_int_distribution<int> byte(0, 255);

  SUBCASE("axpy") {
    for (std::size_t n : {1u, 7u, 8u, 17u, 64u, 131u}) {
      std::vector<float> src(n), d0(n), d1(n);
      for (std::size_t i = 0; i < n; ++i) {
        src[i] = dist(rng);
        d0[i] = d1[i] = dist(rng);
      }
      const float a = dist(rng);
      s.axpy_f32(d0.data(), src.data(), a, n);
      v.axpy_f32(d1.data(), src.data(), a, n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(d0[i] - d1[i]) <= 1e-5f * (std::abs(d0[i]) + 1.0f));
    }
  }

  SUBCASE("dot") {
    for (std::size_t n : {1u, 9u, 64u, 255u}) {
      std::vector<float> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = dist(rng);
        b[i] = dist(rng);
      }
      const float ds = s.dot_f32(a.data(), b.data(), n);
      const float dv = v.dot_f32(a.data(), b.data(), n);
      CHECK(std::abs(ds - dv) <= 1e-4f * (std::abs(ds) + 1.0f));
    }
  }

  SUBCASE("axpy3") {
    for (std::size_t n : {1u, 6u, 8u, 62u, 130u}) {
      std::vector<float> src(n + 2), d0(n), d1(n);
      for (auto& x : src) x = dist(rng);
      for (std::size_t i = 0; i < n; ++i) d0[i] = d1[i] = dist(rng);
      const float a0 = dist(rng), a1 = dist(rng), a2 = dist(rng);
      s.axpy3_f32(d0.data(), src.data(), a0, a1, a2, n);
      v.axpy3_f32(d1.data(), src.data(), a0, a1, a2, n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(d0[i] - d1[i]) <= 1e-5f * (std::abs(d0[i]) + 1.0f));
    }
  }

  SUBCASE("dot3") {
    for (std::size_t n : {1u, 7u, 64u, 129u}) {
      std::vector<float> a(n), b(n + 2);
      for (auto& x : a) x = dist(rng);
      for (auto& x : b) x = dist(rng);
      float o0[3] = {1.0f, 2.0f, 3.0f};
      float o1[3] = {1.0f, 2.0f, 3.0f};
      s.dot3_f32(a.data(), b.data(), n, o0);
      v.dot3_f32(a.data(), b.data(), n, o1);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(o0[k] - o1[k]) <= 1e-4f * (std::abs(o0[k]) + 1.0f));
    }
  }

  SUBCASE("sad and sse are exactly equal") {
    for (int w : {3, 8, 16, 23}) {
      for (int h : {1, 5, 16}) {
        const int stride = w + 5;
        std::vector<std::uint8_t> a(static_cast<std::size_t>(stride) * h);
        std::vector<std::uint8_t> b(a.size());
        for (auto& x : a) x = static_cast<std::uint8_t>(byte(rng));
        for (auto& x : b) x = static_cast<std::uint8_t>(byte(rng));
        CHECK(s.sad_u8(a.data(), stride, b.data(), stride, w, h) ==
              v.sad_u8(a.data(), stride, b.data(), stride, w, h));
        CHECK(s.sse_u8(a.data(), stride, b.data(), stride, w, h) ==
              v.sse_u8(a.data(), stride, b.data(), stride, w, h));
      }
    }
  }
}

TEST_CASE("scalar kernels compute the obvious sums") {
  const kern::Ops& s = kern::scalar_ops();
  const std::uint8_t a[4] = {10, 20, 30, 40};
  const std::uint8_t b[4] = {12, 18, 30, 35};
  CHECK(s.sad_u8(a, 4, b, 4, 4, 1) == 2 + 2 + 0 + 5);
  CHECK(s.sse_u8(a, 4, b, 4, 4, 1) == 4 + 4 + 0 + 25);
  float d[3] = {1.0f, 2.0f, 3.0f};
  const float x[3] = {10.0f, 20.0f, 30.0f};
  s.axpy_f32(d, x, 0.5f, 3);
  CHECK(d[0] == doctest::Approx(6.0f));
  CHECK(d[2] == doctest::Approx(18.0f));
  CHECK(s.dot_f32(d, x, 3) == doctest::Approx(6.0f * 10 + 12 * 20 + 18 * 30));
}
