// SPDX-License-Identifier: Apache-2.0
#include "arpvc/videoio.hpp"

#include <fstream>
#include <stdexcept>

namespace arpvc {

std::vector<Picture> read_raw_video(const std::string& path, int width, int height) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0)
    throw std::invalid_argument("raw video: dimensions must be even, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw std::runtime_error("raw video: cannot open: " + path);
  const std::uint64_t file_size = static_cast<std::uint64_t>(is.tellg());
  const std::uint64_t frame = frame_bytes(width, height);
  if (file_size % frame != 0) {
    const std::uint64_t whole = (file_size / frame) * frame;
    throw std::runtime_error("raw video: " + path + " is truncated: size " +
                             std::to_string(file_size) + " is not a multiple of the frame size " +
                             std::to_string(frame) + "; last whole frame ends at byte offset " +
                             std::to_string(whole));
  }
  is.seekg(0);
  const std::size_t count = static_cast<std::size_t>(file_size / frame);
  std::vector<Picture> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Picture pic(width, height);
    is.read(reinterpret_cast<char*>(pic.y.data()), static_cast<std::streamsize>(pic.y.size()));
    is.read(reinterpret_cast<char*>(pic.cb.data()), static_cast<std::streamsize>(pic.cb.size()));
    is.read(reinterpret_cast<char*>(pic.cr.data()), static_cast<std::streamsize>(pic.cr.size()));
    if (!is) throw std::runtime_error("raw video: read failed in " + path);
    frames.push_back(std::move(pic));
  }
  return frames;
}

void append_raw_frame(std::ostream& os, const Picture& pic) {
  os.write(reinterpret_cast<const char*>(pic.y.data()), static_cast<std::streamsize>(pic.y.size()));
  os.write(reinterpret_cast<const char*>(pic.cb.data()), static_cast<std::streamsize>(pic.cb.size()));
  os.write(reinterpret_cast<const char*>(pic.cr.data()), static_cast<std::streamsize>(pic.cr.size()));
}

void write_raw_video(const std::string& path, const std::vector<Picture>& frames) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("raw video: cannot open for writing: " + path);
  for (const Picture& pic : frames) append_raw_frame(os, pic);
  if (!os) throw std::runtime_error("raw video: write failed: " + path);
}

std::vector<Snippet> extract_snippets(const std::vector<Picture>& frames, int stride) {
  if (stride < 1) throw std::invalid_argument("snippets: stride must be >= 1, got " +
                                              std::to_string(stride));
  std::vector<Snippet> out;
  if (frames.size() < 5) return out;
  const std::size_t count = (frames.size() - 5) / static_cast<std::size_t>(stride) + 1;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Snippet snip;
    for (int k = 0; k < 5; ++k) snip.frames[k] = frames[s * stride + k];
    out.push_back(std::move(snip));
  }
  return out;
}

}  // namespace arpvc
