// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "arpvc/picture.hpp"

namespace arpvc {

struct MotionResult {
  int ref = -1;
  int mvx = 0, mvy = 0;
  std::uint32_t sad = 0;
};

/// Exhaustive integer-pel search over all references and all vectors in
/// [-range, range]^2 whose displaced block stays inside the picture.
/// Minimizes luma SAD; ties break on smaller |v|_1, then smaller reference
/// index, then raster order of v (vy, then vx).
MotionResult motion_search(const std::uint8_t* cur, std::ptrdiff_t cur_stride,
                           const std::vector<const Picture*>& refs, int block_x, int block_y,
                           int block_w, int block_h, int range);

}  // namespace arpvc
