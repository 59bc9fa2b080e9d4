// SPDX-License-Identifier: Apache-2.0
#include "arpvc/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "arpvc/kernels.hpp"

namespace arpvc {

namespace {
void check_dims(const Picture& a, const Picture& b, const char* what) {
  if (!a.same_dims(b))
    throw std::invalid_argument(std::string(what) + ": dimension mismatch, " +
                                std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                                std::to_string(b.width) + "x" + std::to_string(b.height));
}
}  // namespace

double plane_mse(const std::uint8_t* a, const std::uint8_t* b, int w, int h) {
  const std::uint64_t sse = kern::sse(a, w, b, w, w, h);
  return static_cast<double>(sse) / (static_cast<double>(w) * h);
}

double picture_mse_luma(const Picture& a, const Picture& b) {
  check_dims(a, b, "mse");
  return plane_mse(a.y.data(), b.y.data(), a.width, a.height);
}

double picture_mse_all_planes(const Picture& a, const Picture& b) {
  check_dims(a, b, "mse");
  const std::uint64_t sy = kern::sse(a.y.data(), a.width, b.y.data(), b.width, a.width, a.height);
  const int cw = a.chroma_width(), ch = a.chroma_height();
  const std::uint64_t scb = kern::sse(a.cb.data(), cw, b.cb.data(), cw, cw, ch);
  const std::uint64_t scr = kern::sse(a.cr.data(), cw, b.cr.data(), cw, cw, ch);
  const double n = static_cast<double>(a.width) * a.height + 2.0 * cw * ch;
  return static_cast<double>(sy + scb + scr) / n;
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double plane_ssim(const std::uint8_t* a, const std::uint8_t* b, int w, int h) {
  if (w < 8 || h < 8)
    throw std::invalid_argument("ssim: planes must be at least 8x8, got " + std::to_string(w) +
                                "x" + std::to_string(h));
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  constexpr int kWin = 8;
  constexpr double kN = kWin * kWin;
  double total = 0.0;
  std::size_t windows = 0;
  for (int y0 = 0; y0 + kWin <= h; ++y0) {
    for (int x0 = 0; x0 + kWin <= w; ++x0) {
      std::uint32_t sa = 0, sb = 0;
      std::uint64_t saa = 0, sbb = 0, sab = 0;
      for (int y = 0; y < kWin; ++y) {
        const std::uint8_t* pa = a + static_cast<std::size_t>(y0 + y) * w + x0;
        const std::uint8_t* pb = b + static_cast<std::size_t>(y0 + y) * w + x0;
        for (int x = 0; x < kWin; ++x) {
          sa += pa[x];
          sb += pb[x];
          saa += static_cast<std::uint64_t>(pa[x]) * pa[x];
          sbb += static_cast<std::uint64_t>(pb[x]) * pb[x];
          sab += static_cast<std::uint64_t>(pa[x]) * pb[x];
        }
      }
      const double mu_a = sa / kN;
      const double mu_b = sb / kN;
      const double var_a = saa / kN - mu_a * mu_a;
      const double var_b = sbb / kN - mu_b * mu_b;
      const double cov = sab / kN - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double picture_ssim_luma(const Picture& a, const Picture& b) {
  check_dims(a, b, "ssim");
  return plane_ssim(a.y.data(), b.y.data(), a.width, a.height);
}

Picture error_image(const Picture& a, const Picture& b) {
  check_dims(a, b, "error image");
  Picture out(a.width, a.height);
  for (std::size_t i = 0; i < out.y.size(); ++i)
    out.y[i] = static_cast<std::uint8_t>(std::abs(int(a.y[i]) - int(b.y[i])));
  return out;
}

}  // namespace arpvc
