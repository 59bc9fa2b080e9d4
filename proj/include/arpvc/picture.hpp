// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "arpvc/tensor.hpp"

namespace arpvc {

/// One frame in planar 8-bit 4:2:0 layout. Luma extents must be even.
struct Picture {
  int width = 0, height = 0;
  std::vector<std::uint8_t> y, cb, cr;

  Picture() = default;
  Picture(int w, int h);

  int chroma_width() const { return width / 2; }
  int chroma_height() const { return height / 2; }
  bool same_dims(const Picture& o) const { return width == o.width && height == o.height; }
  bool operator==(const Picture& o) const = default;
};

inline std::size_t frame_bytes(int w, int h) {
  return static_cast<std::size_t>(w) * h * 3 / 2;
}

/// Normalized full-resolution 3-plane view in [0,1]; chroma is replicated
/// to luma resolution (nearest neighbour).
Tensor<float> picture_to_tensor(const Picture& pic);

/// Inverse of picture_to_tensor: clamp to [0,1], scale to [0,255], round;
/// chroma planes are 2x2-mean downsampled back to 4:2:0.
Picture tensor_to_picture(const Tensor<float>& t);

/// Five consecutive pictures: frames[0..3] are the references t-4..t-1,
/// frames[4] is the target t0.
struct Snippet {
  std::array<Picture, 5> frames;
};

void write_pgm(const std::string& path, const std::uint8_t* data, int w, int h);

}  // namespace arpvc
