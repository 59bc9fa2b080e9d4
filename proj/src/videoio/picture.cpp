// SPDX-License-Identifier: Apache-2.0
#include "arpvc/picture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace arpvc {

Picture::Picture(int w, int h) : width(w), height(h) {
  if (w < 2 || h < 2 || w % 2 != 0 || h % 2 != 0)
    throw std::invalid_argument("picture: luma extents must be even and >= 2, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  y.assign(static_cast<std::size_t>(w) * h, 0);
  cb.assign(static_cast<std::size_t>(w / 2) * (h / 2), 128);
  cr.assign(static_cast<std::size_t>(w / 2) * (h / 2), 128);
}

Tensor<float> picture_to_tensor(const Picture& pic) {
  const int w = pic.width, h = pic.height, cw = pic.chroma_width();
  Tensor<float> t({3, h, w});
  float* py = t.plane(0);
  float* pcb = t.plane(1);
  float* pcr = t.plane(2);
  constexpr float kInv = 1.0f / 255.0f;
  for (int yy = 0; yy < h; ++yy) {
    const std::uint8_t* ly = pic.y.data() + static_cast<std::size_t>(yy) * w;
    const std::uint8_t* lcb = pic.cb.data() + static_cast<std::size_t>(yy / 2) * cw;
    const std::uint8_t* lcr = pic.cr.data() + static_cast<std::size_t>(yy / 2) * cw;
    const std::size_t row = static_cast<std::size_t>(yy) * w;
    for (int xx = 0; xx < w; ++xx) {
      py[row + xx] = ly[xx] * kInv;
      pcb[row + xx] = lcb[xx / 2] * kInv;
      pcr[row + xx] = lcr[xx / 2] * kInv;
    }
  }
  return t;
}

namespace {
inline std::uint8_t to_sample(float v) {
  v = std::min(std::max(v, 0.0f), 1.0f);
  return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}
}  // namespace

Picture tensor_to_picture(const Tensor<float>& t) {
  if (t.rank() != 3 || t.extent(0) != 3)
    throw std::invalid_argument("tensor_to_picture: need a 3-plane tensor, got " + t.shape_str());
  const int h = t.extent(1), w = t.extent(2);
  Picture pic(w, h);
  const float* py = t.plane(0);
  for (std::size_t i = 0; i < pic.y.size(); ++i) pic.y[i] = to_sample(py[i]);
  const int cw = pic.chroma_width(), ch = pic.chroma_height();
  for (int plane = 1; plane <= 2; ++plane) {
    const float* p = t.plane(plane);
    std::uint8_t* dst = plane == 1 ? pic.cb.data() : pic.cr.data();
    for (int cy = 0; cy < ch; ++cy) {
      for (int cx = 0; cx < cw; ++cx) {
        const std::size_t i0 = static_cast<std::size_t>(2 * cy) * w + 2 * cx;
        const float mean = 0.25f * (p[i0] + p[i0 + 1] + p[i0 + w] + p[i0 + w + 1]);
        dst[static_cast<std::size_t>(cy) * cw + cx] = to_sample(mean);
      }
    }
  }
  return pic;
}

void write_pgm(const std::string& path, const std::uint8_t* data, int w, int h) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("pgm: cannot open for writing: " + path);
  os << "P5\n" << w << " " << h << "\n255\n";
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(w) * h);
  if (!os) throw std::runtime_error("pgm: write failed: " + path);
}

}  // namespace arpvc
