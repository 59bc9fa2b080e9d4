// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "arpvc/kernels.hpp"
#include "arpvc/tensor.hpp"

namespace arpvc {

// ---------------------------------------------------------------------------
// 2-D convolution, same padding (zero fill). Activations are (C,H,W), weights
// (Cout,Cin,K,K) with odd K, bias (Cout). The inner loops run over image rows
// so the row kernels can vectorize.
// ---------------------------------------------------------------------------

template <typename T>
void conv2d_check(const Tensor<T>& in, const Tensor<T>& w, const Tensor<T>& b) {
  if (in.rank() != 3) throw std::invalid_argument("conv2d: input rank must be 3, got " + std::to_string(in.rank()));
  if (w.rank() != 4) throw std::invalid_argument("conv2d: kernel rank must be 4, got " + std::to_string(w.rank()));
  if (w.extent(1) != in.extent(0))
    throw std::invalid_argument("conv2d: kernel in-channel axis " + std::to_string(w.extent(1)) +
                                " does not match input channel axis " + std::to_string(in.extent(0)));
  if (w.extent(2) != w.extent(3) || w.extent(2) % 2 == 0)
    throw std::invalid_argument("conv2d: kernel spatial axes must be odd and square, got " + w.shape_str());
  if (b.rank() != 1 || b.extent(0) != w.extent(0))
    throw std::invalid_argument("conv2d: bias axis " + std::to_string(b.extent(0)) +
                                " does not match kernel out-channel axis " + std::to_string(w.extent(0)));
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& in, const Tensor<T>& w, const Tensor<T>& b) {
  conv2d_check(in, w, b);
  const int ci = in.extent(0), h = in.extent(1), wd = in.extent(2);
  const int co = w.extent(0), k = w.extent(2), pad = k / 2;
  Tensor<T> out({co, h, wd});
  for (int o = 0; o < co; ++o) {
    T* op = out.plane(o);
    const T bias = b[o];
    for (int i = 0; i < h * wd; ++i) op[i] = bias;
    for (int c = 0; c < ci; ++c) {
      const T* ip = in.plane(c);
      if (k == 3 && wd >= 2) {
        // fused row kernel: one pass per (ky, y) over all three taps
        for (int ky = 0; ky < 3; ++ky) {
          const T w0 = w.at4(o, c, ky, 0), w1 = w.at4(o, c, ky, 1), w2 = w.at4(o, c, ky, 2);
          if (w0 == T(0) && w1 == T(0) && w2 == T(0)) continue;
          for (int y = 0; y < h; ++y) {
            const int iy = y + ky - 1;
            if (iy < 0 || iy >= h) continue;
            T* orow = op + static_cast<std::size_t>(y) * wd;
            const T* irow = ip + static_cast<std::size_t>(iy) * wd;
            kern::axpy3(orow + 1, irow, w0, w1, w2, static_cast<std::size_t>(wd - 2));
            orow[0] += w1 * irow[0] + w2 * irow[1];
            orow[wd - 1] += w0 * irow[wd - 2] + w1 * irow[wd - 1];
          }
        }
        continue;
      }
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T wv = w.at4(o, c, ky, kx);
          if (wv == T(0)) continue;
          const int dx = kx - pad;
          const int x0 = dx < 0 ? -dx : 0;
          const int x1 = dx > 0 ? wd - dx : wd;
          if (x1 <= x0) continue;
          for (int y = 0; y < h; ++y) {
            const int iy = y + ky - pad;
            if (iy < 0 || iy >= h) continue;
            kern::axpy(op + static_cast<std::size_t>(y) * wd + x0,
                       ip + static_cast<std::size_t>(iy) * wd + x0 + dx, wv,
                       static_cast<std::size_t>(x1 - x0));
          }
        }
      }
    }
  }
  return out;
}

/// Accumulates into dw/db; din (when non-null) is overwritten.
template <typename T>
void conv2d_backward(const Tensor<T>& in, const Tensor<T>& w, const Tensor<T>& dout,
                     Tensor<T>* din, Tensor<T>& dw, Tensor<T>& db) {
  const int ci = in.extent(0), h = in.extent(1), wd = in.extent(2);
  const int co = w.extent(0), k = w.extent(2), pad = k / 2;
  const bool fast3 = k == 3 && wd >= 2;
  if (din) {
    *din = Tensor<T>(in.shape());
    for (int o = 0; o < co; ++o) {
      const T* gp = dout.plane(o);
      for (int c = 0; c < ci; ++c) {
        T* dp = din->plane(c);
        if (fast3) {
          for (int ky = 0; ky < 3; ++ky) {
            const T w0 = w.at4(o, c, ky, 0), w1 = w.at4(o, c, ky, 1), w2 = w.at4(o, c, ky, 2);
            if (w0 == T(0) && w1 == T(0) && w2 == T(0)) continue;
            for (int y = 0; y < h; ++y) {
              const int iy = y + ky - 1;
              if (iy < 0 || iy >= h) continue;
              T* drow = dp + static_cast<std::size_t>(iy) * wd;
              const T* grow = gp + static_cast<std::size_t>(y) * wd;
              // transpose of the forward taps: reversed weight order
              kern::axpy3(drow + 1, grow, w2, w1, w0, static_cast<std::size_t>(wd - 2));
              drow[0] += w1 * grow[0] + w0 * grow[1];
              drow[wd - 1] += w2 * grow[wd - 2] + w1 * grow[wd - 1];
            }
          }
          continue;
        }
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const T wv = w.at4(o, c, ky, kx);
            if (wv == T(0)) continue;
            const int dx = kx - pad;
            const int x0 = dx < 0 ? -dx : 0;
            const int x1 = dx > 0 ? wd - dx : wd;
            if (x1 <= x0) continue;
            for (int y = 0; y < h; ++y) {
              const int iy = y + ky - pad;
              if (iy < 0 || iy >= h) continue;
              kern::axpy(dp + static_cast<std::size_t>(iy) * wd + x0 + dx,
                         gp + static_cast<std::size_t>(y) * wd + x0, wv,
                         static_cast<std::size_t>(x1 - x0));
            }
          }
        }
      }
    }
  }
  for (int o = 0; o < co; ++o) {
    const T* gp = dout.plane(o);
    T bsum = T(0);
    for (int i = 0; i < h * wd; ++i) bsum += gp[i];
    db[o] += bsum;
    for (int c = 0; c < ci; ++c) {
      const T* ip = in.plane(c);
      if (fast3) {
        for (int ky = 0; ky < 3; ++ky) {
          T acc[3] = {T(0), T(0), T(0)};
          for (int y = 0; y < h; ++y) {
            const int iy = y + ky - 1;
            if (iy < 0 || iy >= h) continue;
            const T* grow = gp + static_cast<std::size_t>(y) * wd;
            const T* irow = ip + static_cast<std::size_t>(iy) * wd;
            kern::dot3(grow + 1, irow, static_cast<std::size_t>(wd - 2), acc);
            acc[1] += grow[0] * irow[0];
            acc[2] += grow[0] * irow[1];
            acc[0] += grow[wd - 1] * irow[wd - 2];
            acc[1] += grow[wd - 1] * irow[wd - 1];
          }
          dw.at4(o, c, ky, 0) += acc[0];
          dw.at4(o, c, ky, 1) += acc[1];
          dw.at4(o, c, ky, 2) += acc[2];
        }
        continue;
      }
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const int x0 = dx < 0 ? -dx : 0;
          const int x1 = dx > 0 ? wd - dx : wd;
          if (x1 <= x0) continue;
          T acc = T(0);
          for (int y = 0; y < h; ++y) {
            const int iy = y + ky - pad;
            if (iy < 0 || iy >= h) continue;
            acc += kern::dot(gp + static_cast<std::size_t>(y) * wd + x0,
                             ip + static_cast<std::size_t>(iy) * wd + x0 + dx,
                             static_cast<std::size_t>(x1 - x0));
          }
          dw.at4(o, c, ky, kx) += acc;
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2. Ties go to the first element in raster order.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> maxpool2(const Tensor<T>& in, std::vector<std::uint8_t>* argmax = nullptr) {
  const int c = in.extent(0), h = in.extent(1), w = in.extent(2);
  if (h % 2 != 0) throw std::invalid_argument("maxpool2: height axis " + std::to_string(h) + " is odd");
  if (w % 2 != 0) throw std::invalid_argument("maxpool2: width axis " + std::to_string(w) + " is odd");
  Tensor<T> out({c, h / 2, w / 2});
  if (argmax) argmax->assign(out.size(), 0);
  std::size_t oi = 0;
  for (int ch = 0; ch < c; ++ch) {
    const T* ip = in.plane(ch);
    for (int y = 0; y < h; y += 2) {
      const T* r0 = ip + static_cast<std::size_t>(y) * w;
      const T* r1 = r0 + w;
      for (int x = 0; x < w; x += 2, ++oi) {
        T best = r0[x];
        std::uint8_t pos = 0;
        if (r0[x + 1] > best) { best = r0[x + 1]; pos = 1; }
        if (r1[x] > best) { best = r1[x]; pos = 2; }
        if (r1[x + 1] > best) { best = r1[x + 1]; pos = 3; }
        out[oi] = best;
        if (argmax) (*argmax)[oi] = pos;
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> maxpool2_backward(const Tensor<T>& dout, const std::vector<std::uint8_t>& argmax,
                            int in_h, int in_w) {
  const int c = dout.extent(0), oh = dout.extent(1), ow = dout.extent(2);
  Tensor<T> din({c, in_h, in_w});
  std::size_t oi = 0;
  for (int ch = 0; ch < c; ++ch) {
    T* dp = din.plane(ch);
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x, ++oi) {
        const std::uint8_t pos = argmax[oi];
        const int iy = 2 * y + (pos >> 1);
        const int ix = 2 * x + (pos & 1);
        dp[static_cast<std::size_t>(iy) * in_w + ix] += dout[oi];
      }
    }
  }
  return din;
}

// ---------------------------------------------------------------------------
// 2x nearest-neighbour upsampling.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> upsample2(const Tensor<T>& in) {
  const int c = in.extent(0), h = in.extent(1), w = in.extent(2);
  Tensor<T> out({c, 2 * h, 2 * w});
  for (int ch = 0; ch < c; ++ch) {
    const T* ip = in.plane(ch);
    T* op = out.plane(ch);
    for (int y = 0; y < h; ++y) {
      const T* src = ip + static_cast<std::size_t>(y) * w;
      T* d0 = op + static_cast<std::size_t>(2 * y) * 2 * w;
      T* d1 = d0 + 2 * w;
      for (int x = 0; x < w; ++x) {
        d0[2 * x] = d0[2 * x + 1] = src[x];
        d1[2 * x] = d1[2 * x + 1] = src[x];
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> upsample2_backward(const Tensor<T>& dout) {
  const int c = dout.extent(0), h = dout.extent(1) / 2, w = dout.extent(2) / 2;
  Tensor<T> din({c, h, w});
  for (int ch = 0; ch < c; ++ch) {
    const T* gp = dout.plane(ch);
    T* dp = din.plane(ch);
    for (int y = 0; y < h; ++y) {
      const T* g0 = gp + static_cast<std::size_t>(2 * y) * 2 * w;
      const T* g1 = g0 + 2 * w;
      T* dst = dp + static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x)
        dst[x] = g0[2 * x] + g0[2 * x + 1] + g1[2 * x] + g1[2 * x + 1];
    }
  }
  return din;
}

// ---------------------------------------------------------------------------
// Pointwise nonlinearities.
// ---------------------------------------------------------------------------

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
void relu_inplace(Tensor<T>& t) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] < T(0)) t[i] = T(0);
}

/// Gradient mask derived from the post-activation value: units at exactly
/// zero are treated as inactive.
template <typename T>
void relu_backward_inplace(Tensor<T>& grad, const Tensor<T>& post) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (post[i] <= T(0)) grad[i] = T(0);
}

template <typename T>
void clamp01_inplace(Tensor<T>& t) {
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::min(std::max(t[i], T(0)), T(1));
}

template <typename T>
void clamp01_backward_inplace(Tensor<T>& grad, const Tensor<T>& pre) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (pre[i] <= T(0) || pre[i] >= T(1)) grad[i] = T(0);
}

}  // namespace arpvc
