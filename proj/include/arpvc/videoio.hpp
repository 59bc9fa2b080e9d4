// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "arpvc/picture.hpp"

namespace arpvc {

/// Headerless planar I420, dimensions supplied out-of-band.
std::vector<Picture> read_raw_video(const std::string& path, int width, int height);
void write_raw_video(const std::string& path, const std::vector<Picture>& frames);
void append_raw_frame(std::ostream& os, const Picture& pic);

/// Sliding 5-frame windows at the given stride. Fewer than 5 input frames
/// yields an empty list.
std::vector<Snippet> extract_snippets(const std::vector<Picture>& frames, int stride);

}  // namespace arpvc
