// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "arpvc/picture.hpp"

namespace arpvc {

/// Mean squared 8-bit sample difference.
double plane_mse(const std::uint8_t* a, const std::uint8_t* b, int w, int h);
double picture_mse_luma(const Picture& a, const Picture& b);
double picture_mse_all_planes(const Picture& a, const Picture& b);

/// 99 dB cap keeps lossless planes finite for curve fitting.
double psnr_from_mse(double mse);

/// Mean local SSIM over 8x8 windows, stride 1, uniform weighting,
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2.
double plane_ssim(const std::uint8_t* a, const std::uint8_t* b, int w, int h);
double picture_ssim_luma(const Picture& a, const Picture& b);

/// Per-sample absolute luma difference as a viewable grayscale picture
/// (neutral chroma).
Picture error_image(const Picture& a, const Picture& b);

}  // namespace arpvc
