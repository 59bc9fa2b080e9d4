// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace arpvc {

/// Orthonormal 8x8 DCT-II residual coding with a dead-zone scalar quantizer
/// (step Q = 2^((QP-4)/6), rounding offset 1/3) and a signed exp-Golomb code
/// length as the per-coefficient rate proxy.

double quant_step(int qp);

void dct8x8_forward(const double* in, double* out);
void dct8x8_inverse(const double* in, double* out);

/// Code length in bits of v under signed exp-Golomb.
int eg_signed_len(int v);

/// residual -> quantized coefficients; returns the rate proxy in bits
/// (sum of signed exp-Golomb lengths over all 64 coefficients).
int transform_quantize(const std::int16_t* residual, int qp, std::int16_t* coeffs);

/// Dequantize + inverse transform, rounded to integers.
void reconstruct_residual(const std::int16_t* coeffs, int qp, std::int16_t* out);

}  // namespace arpvc
