// SPDX-License-Identifier: Apache-2.0
#include "arpvc/motion.hpp"

#include <cstdlib>
#include <stdexcept>

#include "arpvc/kernels.hpp"

namespace arpvc {

MotionResult motion_search(const std::uint8_t* cur, std::ptrdiff_t cur_stride,
                           const std::vector<const Picture*>& refs, int block_x, int block_y,
                           int block_w, int block_h, int range) {
  if (refs.empty()) throw std::invalid_argument("motion search: empty reference list");
  if (range < 0) throw std::invalid_argument("motion search: negative range");
  MotionResult best;
  int best_l1 = 0;
  for (int r = 0; r < static_cast<int>(refs.size()); ++r) {
    const Picture& ref = *refs[r];
    const std::uint8_t* ref_plane = ref.y.data();
    for (int vy = -range; vy <= range; ++vy) {
      const int sy = block_y + vy;
      if (sy < 0 || sy + block_h > ref.height) continue;
      for (int vx = -range; vx <= range; ++vx) {
        const int sx = block_x + vx;
        if (sx < 0 || sx + block_w > ref.width) continue;
        const std::uint32_t sad =
            kern::sad(cur, cur_stride,
                      ref_plane + static_cast<std::size_t>(sy) * ref.width + sx, ref.width,
                      block_w, block_h);
        const int l1 = std::abs(vx) + std::abs(vy);
        bool better;
        if (best.ref < 0 || sad < best.sad) {
          better = true;
        } else if (sad > best.sad) {
          better = false;
        } else if (l1 != best_l1) {
          better = l1 < best_l1;
        } else if (r != best.ref) {
          better = r < best.ref;
        } else {
          // raster order: earlier (vy, vx) wins; iteration is already in
          // raster order within one reference, so keep the incumbent
          better = false;
        }
        if (better) {
          best.ref = r;
          best.mvx = vx;
          best.mvy = vy;
          best.sad = sad;
          best_l1 = l1;
        }
      }
    }
  }
  if (best.ref < 0) throw std::runtime_error("motion search: no valid candidate (block outside picture?)");
  return best;
}

}  // namespace arpvc
