// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arpvc/picture.hpp"

namespace arpvc {

struct SyntheticObject {
  enum class Kind { Rect, Disc };
  Kind kind = Kind::Rect;
  // Rect: (x, y) is the top-left corner, extents (w, h).
  // Disc: (x, y) is the centre, radius r.
  double x = 0, y = 0;
  double w = 0, h = 0;
  double r = 0;
  double vx = 0, vy = 0;  // pel per frame, may be fractional
  std::uint32_t texture_seed = 1;
};

/// Textured moving objects over a static textured background. Serialized as
/// a small key-value text format (see to_text/parse).
struct SyntheticSpec {
  int width = 64, height = 64;
  int frames = 9;
  std::uint64_t background_seed = 1;
  int background_flat = -1;  // >= 0: constant luma backdrop instead of noise
  bool occlusion = false;
  std::vector<SyntheticObject> objects;

  std::string to_text() const;
  static SyntheticSpec parse(const std::string& text);
};

/// Deterministic per (spec, seed). Fractional object positions are rendered
/// by bilinear resampling of per-object texture bitmaps.
std::vector<Picture> synthesize(const SyntheticSpec& spec, std::uint64_t seed);

struct RandomSpecOptions {
  int min_objects = 1, max_objects = 3;
  double max_speed = 2.6;
  bool fractional = true;  // continuous velocities; false rounds to integer pel
  bool occlusion = false;  // two objects on crossing paths
};
SyntheticSpec random_spec(int width, int height, int frames, std::mt19937& rng,
                          const RandomSpecOptions& opt = {});

}  // namespace arpvc
