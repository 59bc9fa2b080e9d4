// SPDX-License-Identifier: Apache-2.0
#include "arpvc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace arpvc {

namespace {

std::mt19937 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream) to decorrelate texture streams
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + stream + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  std::seed_seq seq{static_cast<std::uint32_t>(z), static_cast<std::uint32_t>(z >> 32)};
  return std::mt19937(seq);
}

struct Bitmap {
  int w = 0, h = 0;
  std::vector<float> v;
  float at(int x, int y) const {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return v[static_cast<std::size_t>(y) * w + x];
  }
  float bilinear(double u, double t) const {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(t));
    const float fx = static_cast<float>(u - x0);
    const float fy = static_cast<float>(t - y0);
    const float a = at(x0, y0) * (1 - fx) + at(x0 + 1, y0) * fx;
    const float b = at(x0, y0 + 1) * (1 - fx) + at(x0 + 1, y0 + 1) * fx;
    return a * (1 - fy) + b * fy;
  }
};

/// Low-frequency value noise: a coarse random lattice upsampled bilinearly.
Bitmap smooth_noise(int w, int h, int cell, float lo, float hi, std::mt19937& rng) {
  const int gw = w / cell + 2, gh = h / cell + 2;
  std::vector<float> lattice(static_cast<std::size_t>(gw) * gh);
  std::uniform_real_distribution<float> dist(lo, hi);
  for (auto& g : lattice) g = dist(rng);
  Bitmap bmp;
  bmp.w = w;
  bmp.h = h;
  bmp.v.resize(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const double gy = static_cast<double>(y) / cell;
    const int y0 = static_cast<int>(gy);
    const float fy = static_cast<float>(gy - y0);
    for (int x = 0; x < w; ++x) {
      const double gx = static_cast<double>(x) / cell;
      const int x0 = static_cast<int>(gx);
      const float fx = static_cast<float>(gx - x0);
      const float a = lattice[y0 * gw + x0] * (1 - fx) + lattice[y0 * gw + x0 + 1] * fx;
      const float b = lattice[(y0 + 1) * gw + x0] * (1 - fx) + lattice[(y0 + 1) * gw + x0 + 1] * fx;
      bmp.v[static_cast<std::size_t>(y) * w + x] = a * (1 - fy) + b * fy;
    }
  }
  return bmp;
}

struct RenderedObject {
  const SyntheticObject* obj;
  Bitmap luma, cb, cr;
  double bw = 0, bh = 0;  // footprint extents (rect w/h or disc bounding box)
};

inline std::uint8_t pack(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 255.0f)));
}

}  // namespace

std::vector<Picture> synthesize(const SyntheticSpec& spec, std::uint64_t seed) {
  const int w = spec.width, h = spec.height;
  if (w < 8 || h < 8 || w % 2 || h % 2)
    throw std::invalid_argument("synth: canvas must be even and >= 8x8, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  std::mt19937 bg_rng = seeded_rng(seed, spec.background_seed);
  Bitmap bg_y, bg_cb, bg_cr;
  if (spec.background_flat >= 0) {
    bg_y.w = bg_cb.w = bg_cr.w = w;
    bg_y.h = bg_cb.h = bg_cr.h = h;
    bg_y.v.assign(static_cast<std::size_t>(w) * h, static_cast<float>(spec.background_flat));
    bg_cb.v.assign(bg_y.v.size(), 128.0f);
    bg_cr.v.assign(bg_y.v.size(), 128.0f);
  } else {
    bg_y = smooth_noise(w, h, 13, 64.0f, 192.0f, bg_rng);
    bg_cb = smooth_noise(w, h, 16, 108.0f, 148.0f, bg_rng);
    bg_cr = smooth_noise(w, h, 16, 108.0f, 148.0f, bg_rng);
  }

  std::vector<RenderedObject> ros;
  for (const SyntheticObject& obj : spec.objects) {
    std::mt19937 rng = seeded_rng(seed, 0x0b9ec7 + obj.texture_seed);
    RenderedObject ro;
    ro.obj = &obj;
    ro.bw = obj.kind == SyntheticObject::Kind::Rect ? obj.w : 2 * obj.r;
    ro.bh = obj.kind == SyntheticObject::Kind::Rect ? obj.h : 2 * obj.r;
    const int bw = static_cast<int>(std::ceil(ro.bw)) + 2;
    const int bh = static_cast<int>(std::ceil(ro.bh)) + 2;
    ro.luma = smooth_noise(bw, bh, 6, 36.0f, 220.0f, rng);
    ro.cb = smooth_noise(bw, bh, 8, 92.0f, 164.0f, rng);
    ro.cr = smooth_noise(bw, bh, 8, 92.0f, 164.0f, rng);
    ros.push_back(std::move(ro));
  }

  std::vector<Picture> frames;
  frames.reserve(spec.frames);
  std::vector<float> fy(static_cast<std::size_t>(w) * h);
  std::vector<float> fcb(fy.size()), fcr(fy.size());
  for (int t = 0; t < spec.frames; ++t) {
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) {
        const std::size_t i = static_cast<std::size_t>(py) * w + px;
        fy[i] = bg_y.v[i];
        fcb[i] = bg_cb.v[i];
        fcr[i] = bg_cr.v[i];
        for (const RenderedObject& ro : ros) {
          const SyntheticObject& o = *ro.obj;
          const double ox = o.x + o.vx * t;
          const double oy = o.y + o.vy * t;
          double u, v;
          bool inside;
          if (o.kind == SyntheticObject::Kind::Rect) {
            u = px - ox;
            v = py - oy;
            inside = u >= 0 && u < o.w && v >= 0 && v < o.h;
          } else {
            const double dx = px - ox, dy = py - oy;
            inside = dx * dx + dy * dy <= o.r * o.r;
            u = dx + o.r;
            v = dy + o.r;
          }
          if (inside) {
            fy[i] = ro.luma.bilinear(u, v);
            fcb[i] = ro.cb.bilinear(u, v);
            fcr[i] = ro.cr.bilinear(u, v);
          }
        }
      }
    }
    Picture pic(w, h);
    for (std::size_t i = 0; i < fy.size(); ++i) pic.y[i] = pack(fy[i]);
    const int cw = w / 2;
    for (int cy = 0; cy < h / 2; ++cy) {
      for (int cx = 0; cx < cw; ++cx) {
        const std::size_t i0 = static_cast<std::size_t>(2 * cy) * w + 2 * cx;
        pic.cb[static_cast<std::size_t>(cy) * cw + cx] =
            pack(0.25f * (fcb[i0] + fcb[i0 + 1] + fcb[i0 + w] + fcb[i0 + w + 1]));
        pic.cr[static_cast<std::size_t>(cy) * cw + cx] =
            pack(0.25f * (fcr[i0] + fcr[i0 + 1] + fcr[i0 + w] + fcr[i0 + w + 1]));
      }
    }
    frames.push_back(std::move(pic));
  }
  return frames;
}

std::string SyntheticSpec::to_text() const {
  std::ostringstream os;
  os << "canvas " << width << "x" << height << "\n";
  os << "frames " << frames << "\n";
  os << "background_seed " << background_seed << "\n";
  if (background_flat >= 0) os << "background_flat " << background_flat << "\n";
  os << "occlusion " << (occlusion ? 1 : 0) << "\n";
  for (const SyntheticObject& o : objects) {
    os << "object " << (o.kind == SyntheticObject::Kind::Rect ? "rect" : "disc");
    os << " x=" << o.x << " y=" << o.y;
    if (o.kind == SyntheticObject::Kind::Rect)
      os << " w=" << o.w << " h=" << o.h;
    else
      os << " r=" << o.r;
    os << " vx=" << o.vx << " vy=" << o.vy << " tex=" << o.texture_seed << "\n";
  }
  return os.str();
}

SyntheticSpec SyntheticSpec::parse(const std::string& text) {
  SyntheticSpec spec;
  spec.objects.clear();
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const auto fail = [&](const std::string& why) {
      throw std::invalid_argument("synthetic spec line " + std::to_string(line_no) + ": " + why);
    };
    if (key == "canvas") {
      std::string dims;
      ls >> dims;
      const auto x = dims.find('x');
      if (x == std::string::npos) fail("expected WxH");
      spec.width = std::stoi(dims.substr(0, x));
      spec.height = std::stoi(dims.substr(x + 1));
    } else if (key == "frames") {
      ls >> spec.frames;
    } else if (key == "background_seed") {
      ls >> spec.background_seed;
    } else if (key == "background_flat") {
      ls >> spec.background_flat;
    } else if (key == "occlusion") {
      int v = 0;
      ls >> v;
      spec.occlusion = v != 0;
    } else if (key == "object") {
      SyntheticObject o;
      std::string kind;
      ls >> kind;
      if (kind == "rect")
        o.kind = SyntheticObject::Kind::Rect;
      else if (kind == "disc")
        o.kind = SyntheticObject::Kind::Disc;
      else
        fail("unknown object kind '" + kind + "'");
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail("expected key=value, got '" + kv + "'");
        const std::string k = kv.substr(0, eq);
        const double v = std::stod(kv.substr(eq + 1));
        if (k == "x") o.x = v;
        else if (k == "y") o.y = v;
        else if (k == "w") o.w = v;
        else if (k == "h") o.h = v;
        else if (k == "r") o.r = v;
        else if (k == "vx") o.vx = v;
        else if (k == "vy") o.vy = v;
        else if (k == "tex") o.texture_seed = static_cast<std::uint32_t>(v);
        else fail("unknown object field '" + k + "'");
      }
      spec.objects.push_back(o);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return spec;
}

SyntheticSpec random_spec(int width, int height, int frames, std::mt19937& rng,
                          const RandomSpecOptions& opt) {
  SyntheticSpec spec;
  spec.width = width;
  spec.height = height;
  spec.frames = frames;
  spec.background_seed = rng();
  spec.occlusion = opt.occlusion;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = std::min(width, height);
  const auto speed = [&](double lo) {
    const double mag = lo + (opt.max_speed - lo) * unit(rng);
    return unit(rng) < 0.5 ? -mag : mag;
  };
  const auto round_if_integer = [&](double v) {
    if (!opt.fractional) {
      double r = std::round(v);
      if (r == 0.0) r = v < 0 ? -1.0 : 1.0;
      return r;
    }
    return v;
  };
  // Start position such that the object footprint stays inside the canvas
  // for the whole sequence.
  const auto place = [&](double extent, double v, int limit) {
    const double disp = v * (frames - 1);
    double lo = std::max(1.0, 1.0 - disp);
    double hi = std::min(static_cast<double>(limit) - extent - 1.0,
                         static_cast<double>(limit) - extent - 1.0 - disp);
    if (hi < lo) hi = lo;
    return lo + (hi - lo) * unit(rng);
  };

  const int n = opt.occlusion
                    ? 2
                    : opt.min_objects +
                          static_cast<int>(unit(rng) * (opt.max_objects - opt.min_objects + 0.999));
  for (int i = 0; i < n; ++i) {
    SyntheticObject o;
    o.kind = unit(rng) < 0.5 ? SyntheticObject::Kind::Rect : SyntheticObject::Kind::Disc;
    o.texture_seed = rng();
    const double size = scale * (0.20 + 0.18 * unit(rng));
    double vx = round_if_integer(speed(1.2));
    double vy = round_if_integer(speed(0.4) * 0.5);
    if (opt.occlusion) {
      // Two objects on crossing horizontal paths.
      const double mag = 1.2 + (opt.max_speed - 1.2) * unit(rng);
      vx = i == 0 ? mag : -mag;
      vy = round_if_integer(speed(0.2) * 0.25);
      if (!opt.fractional) vx = std::max(1.0, std::round(vx)) * (i == 0 ? 1 : -1);
    }
    if (o.kind == SyntheticObject::Kind::Rect) {
      o.w = size;
      o.h = scale * (0.20 + 0.18 * unit(rng));
      o.x = place(o.w, vx, width);
      o.y = place(o.h, vy, height);
    } else {
      o.r = size / 2;
      o.x = place(2 * o.r, vx, width) + o.r;
      o.y = place(2 * o.r, vy, height) + o.r;
    }
    if (opt.occlusion) {
      // Start on opposite sides at overlapping heights.
      const double span = o.kind == SyntheticObject::Kind::Rect ? o.w : 2 * o.r;
      const double off = o.kind == SyntheticObject::Kind::Rect ? 0.0 : o.r;
      o.x = (i == 0 ? 2.0 : width - span - 2.0) + off;
      o.y = height * (0.30 + 0.25 * unit(rng)) + off;
    }
    o.vx = vx;
    o.vy = vy;
    spec.objects.push_back(o);
  }
  return spec;
}

}  // namespace arpvc
