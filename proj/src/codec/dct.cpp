// SPDX-License-Identifier: Apache-2.0
#include "arpvc/dct.hpp"

#include <cmath>

namespace arpvc {

namespace {

struct CosTable {
  double c[8][8];  // c[u][x] = alpha(u) * cos((2x+1) u pi / 16)
  CosTable() {
    const double pi = std::acos(-1.0);
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) c[u][x] = alpha * std::cos((2 * x + 1) * u * pi / 16.0);
    }
  }
};
const CosTable kCos;

}  // namespace

double quant_step(int qp) { return std::pow(2.0, (qp - 4) / 6.0); }

void dct8x8_forward(const double* in, double* out) {
  double tmp[64];
  // rows
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double s = 0;
      for (int x = 0; x < 8; ++x) s += kCos.c[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = s;
    }
  // columns
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int y = 0; y < 8; ++y) s += kCos.c[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = s;
    }
}

void dct8x8_inverse(const double* in, double* out) {
  double tmp[64];
  for (int u = 0; u < 8; ++u)
    for (int y = 0; y < 8; ++y) {
      double s = 0;
      for (int v = 0; v < 8; ++v) s += kCos.c[v][y] * in[v * 8 + u];
      tmp[y * 8 + u] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int u = 0; u < 8; ++u) s += kCos.c[u][x] * tmp[y * 8 + u];
      out[y * 8 + x] = s;
    }
}

int eg_signed_len(int v) {
  const unsigned u = v > 0 ? 2u * static_cast<unsigned>(v) - 1u
                           : 2u * static_cast<unsigned>(-v);
  int bits = 0;
  unsigned n = u + 1;
  while (n > 1) {
    n >>= 1;
    ++bits;
  }
  return 2 * bits + 1;
}

int transform_quantize(const std::int16_t* residual, int qp, std::int16_t* coeffs) {
  double block[64], freq[64];
  for (int i = 0; i < 64; ++i) block[i] = residual[i];
  dct8x8_forward(block, freq);
  const double q = quant_step(qp);
  int bits = 0;
  for (int i = 0; i < 64; ++i) {
    const double mag = std::abs(freq[i]) / q + 1.0 / 3.0;
    int level = static_cast<int>(mag);  // dead-zone: floor(|c|/Q + 1/3)
    if (freq[i] < 0) level = -level;
    coeffs[i] = static_cast<std::int16_t>(level);
    bits += eg_signed_len(level);
  }
  return bits;
}

void reconstruct_residual(const std::int16_t* coeffs, int qp, std::int16_t* out) {
  double freq[64], block[64];
  const double q = quant_step(qp);
  for (int i = 0; i < 64; ++i) freq[i] = coeffs[i] * q;
  dct8x8_inverse(freq, block);
  for (int i = 0; i < 64; ++i) out[i] = static_cast<std::int16_t>(std::lround(block[i]));
}

}  // namespace arpvc
