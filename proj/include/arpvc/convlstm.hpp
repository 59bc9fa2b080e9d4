// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "arpvc/layers.hpp"
#include "arpvc/tensor.hpp"

namespace arpvc {

/// Convolutional LSTM cell, 3x3 kernels, no peepholes. Gate order along the
/// channel axis is (input, forget, output, candidate).
template <typename T>
struct ConvLstmParams {
  Tensor<T> wx;  // (4*hidden, in, 3, 3)
  Tensor<T> wh;  // (4*hidden, hidden, 3, 3)
  Tensor<T> b;   // (4*hidden)
  int in_ch = 0;
  int hid_ch = 0;

  static ConvLstmParams make(int in_ch, int hid_ch) {
    ConvLstmParams p;
    p.in_ch = in_ch;
    p.hid_ch = hid_ch;
    p.wx = Tensor<T>({4 * hid_ch, in_ch, 3, 3});
    p.wh = Tensor<T>({4 * hid_ch, hid_ch, 3, 3});
    p.b = Tensor<T>({4 * hid_ch});
    return p;
  }
};

template <typename T>
struct ConvLstmTape {
  Tensor<T> x, h_prev, c_prev;
  Tensor<T> gates;   // post-activation, (4*hidden, H, W)
  Tensor<T> c_new;
  Tensor<T> tanh_c;
};

template <typename T>
void convlstm_step(const ConvLstmParams<T>& p, const Tensor<T>& x,
                   const Tensor<T>& h_prev, const Tensor<T>& c_prev,
                   Tensor<T>& h_out, Tensor<T>& c_out, ConvLstmTape<T>* tape = nullptr) {
  if (x.extent(0) != p.in_ch)
    throw std::invalid_argument("convlstm: input channel axis " + std::to_string(x.extent(0)) +
                                " does not match parameter in-channels " + std::to_string(p.in_ch));
  if (h_prev.extent(0) != p.hid_ch || c_prev.extent(0) != p.hid_ch)
    throw std::invalid_argument("convlstm: state channel axis does not match hidden-channels " +
                                std::to_string(p.hid_ch));
  if (h_prev.extent(1) != x.extent(1) || h_prev.extent(2) != x.extent(2))
    throw std::invalid_argument("convlstm: state spatial axes " + h_prev.shape_str() +
                                " do not match input " + x.shape_str());

  const int hh = x.extent(1), ww = x.extent(2), hid = p.hid_ch;
  Tensor<T> pre = conv2d(x, p.wx, p.b);
  {
    Tensor<T> zero_bias({4 * hid});
    Tensor<T> hpre = conv2d(h_prev, p.wh, zero_bias);
    pre += hpre;
  }
  // Activate gates in place: i, f, o sigmoid; g tanh.
  const std::size_t plane = static_cast<std::size_t>(hh) * ww;
  for (int g = 0; g < 4; ++g) {
    T* gp = pre.data() + static_cast<std::size_t>(g) * hid * plane;
    const std::size_t n = static_cast<std::size_t>(hid) * plane;
    if (g < 3)
      for (std::size_t i = 0; i < n; ++i) gp[i] = sigmoid(gp[i]);
    else
      for (std::size_t i = 0; i < n; ++i) gp[i] = std::tanh(gp[i]);
  }

  h_out = Tensor<T>({hid, hh, ww});
  c_out = Tensor<T>({hid, hh, ww});
  const T* gi = pre.data();
  const T* gf = gi + static_cast<std::size_t>(hid) * plane;
  const T* go = gf + static_cast<std::size_t>(hid) * plane;
  const T* gg = go + static_cast<std::size_t>(hid) * plane;
  Tensor<T> tanh_c({hid, hh, ww});
  for (std::size_t i = 0; i < c_out.size(); ++i) {
    c_out[i] = gf[i] * c_prev[i] + gi[i] * gg[i];
    tanh_c[i] = std::tanh(c_out[i]);
    h_out[i] = go[i] * tanh_c[i];
  }

  if (tape) {
    tape->x = x;
    tape->h_prev = h_prev;
    tape->c_prev = c_prev;
    tape->gates = std::move(pre);
    tape->c_new = c_out;
    tape->tanh_c = std::move(tanh_c);
  }
}

template <typename T>
struct ConvLstmGrads {
  Tensor<T> wx, wh, b;
  static ConvLstmGrads zeros(const ConvLstmParams<T>& p) {
    return {Tensor<T>::zeros_like(p.wx), Tensor<T>::zeros_like(p.wh), Tensor<T>::zeros_like(p.b)};
  }
};

/// Backward through one step. dh/dc are gradients w.r.t. h_out/c_out.
/// Parameter gradients accumulate; dx/dh_prev/dc_prev are overwritten.
template <typename T>
void convlstm_backward(const ConvLstmParams<T>& p, const ConvLstmTape<T>& tape,
                       const Tensor<T>& dh, const Tensor<T>& dc,
                       ConvLstmGrads<T>& grads, Tensor<T>& dx, Tensor<T>& dh_prev,
                       Tensor<T>& dc_prev) {
  const int hid = p.hid_ch;
  const std::size_t n = tape.c_new.size();
  const T* gi = tape.gates.data();
  const T* gf = gi + n;
  const T* go = gf + n;
  const T* gg = go + n;

  Tensor<T> dpre = Tensor<T>::zeros_like(tape.gates);
  T* dpi = dpre.data();
  T* dpf = dpi + n;
  T* dpo = dpf + n;
  T* dpg = dpo + n;

  dc_prev = Tensor<T>({hid, tape.c_new.extent(1), tape.c_new.extent(2)});
  for (std::size_t i = 0; i < n; ++i) {
    const T tc = tape.tanh_c[i];
    const T dct = dc[i] + dh[i] * go[i] * (T(1) - tc * tc);
    const T d_o = dh[i] * tc;
    const T d_f = dct * tape.c_prev[i];
    const T d_i = dct * gg[i];
    const T d_g = dct * gi[i];
    dc_prev[i] = dct * gf[i];
    dpi[i] = d_i * gi[i] * (T(1) - gi[i]);
    dpf[i] = d_f * gf[i] * (T(1) - gf[i]);
    dpo[i] = d_o * go[i] * (T(1) - go[i]);
    dpg[i] = d_g * (T(1) - gg[i] * gg[i]);
  }

  conv2d_backward(tape.x, p.wx, dpre, &dx, grads.wx, grads.b);
  Tensor<T> db_unused({4 * hid});
  conv2d_backward(tape.h_prev, p.wh, dpre, &dh_prev, grads.wh, db_unused);
}

}  // namespace arpvc
