// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "arpvc/convlstm.hpp"
#include "arpvc/layers.hpp"
#include "arpvc/tensor.hpp"

namespace arpvc {

// ---------------------------------------------------------------------------
// Four stacked modules, each made of a recurrent Representation (ConvLSTM),
// a Prediction convolution, a Target convolution+pool (modules 2..4; module 1
// takes the raw picture), and a two-way rectified Error. One cycle updates
// the Representations top-down (module 4 -> 1) and then the predictions and
// errors bottom-up (module 1 -> 4). Module m runs at input resolution / 2^m
// (0-based m), so input extents must be multiples of 8.
// ---------------------------------------------------------------------------

inline constexpr int kPredictorModules = 4;

template <typename T>
struct PredictorModel {
  struct Module {
    ConvLstmParams<T> lstm;
    Tensor<T> pred_w, pred_b;  // (ch[m], ch[m], 3, 3), (ch[m])
    Tensor<T> tgt_w, tgt_b;    // modules >= 2: (ch[m], 2*ch[m-1], 3, 3), (ch[m]); empty on module 1
  };

  std::array<int, kPredictorModules> channels{3, 48, 96, 192};
  std::array<Module, kPredictorModules> mods;

  int lstm_in_channels(int m) const {
    return 2 * channels[m] + (m + 1 < kPredictorModules ? channels[m + 1] : 0);
  }

  static PredictorModel zeros(std::array<int, kPredictorModules> ch) {
    if (ch[0] != 3)
      throw std::invalid_argument("predictor: channel plan must start at 3 picture planes, got " +
                                  std::to_string(ch[0]));
    PredictorModel model;
    model.channels = ch;
    for (int m = 0; m < kPredictorModules; ++m) {
      Module& mod = model.mods[m];
      mod.lstm = ConvLstmParams<T>::make(model.lstm_in_channels(m), ch[m]);
      mod.pred_w = Tensor<T>({ch[m], ch[m], 3, 3});
      mod.pred_b = Tensor<T>({ch[m]});
      if (m > 0) {
        mod.tgt_w = Tensor<T>({ch[m], 2 * ch[m - 1], 3, 3});
        mod.tgt_b = Tensor<T>({ch[m]});
      }
    }
    return model;
  }

  /// Uniform init in [-k, k], k = 1/sqrt(fan_in); zero biases.
  static PredictorModel random(std::array<int, kPredictorModules> ch, std::uint64_t seed) {
    PredictorModel model = zeros(ch);
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    model.for_each_param([&rng](const std::string&, Tensor<T>& t) {
      if (t.rank() != 4) return;  // biases stay zero
      const T k = T(1) / std::sqrt(static_cast<T>(t.extent(1) * t.extent(2) * t.extent(3)));
      fill_uniform(t, -k, k, rng);
    });
    return model;
  }

  template <typename F>
  void for_each_param(F&& f) {
    for (int m = 0; m < kPredictorModules; ++m) {
      const std::string p = "mod" + std::to_string(m + 1) + ".";
      f(p + "lstm.wx", mods[m].lstm.wx);
      f(p + "lstm.wh", mods[m].lstm.wh);
      f(p + "lstm.b", mods[m].lstm.b);
      f(p + "pred.w", mods[m].pred_w);
      f(p + "pred.b", mods[m].pred_b);
      if (m > 0) {
        f(p + "tgt.w", mods[m].tgt_w);
        f(p + "tgt.b", mods[m].tgt_b);
      }
    }
  }
  template <typename F>
  void for_each_param(F&& f) const {
    const_cast<PredictorModel*>(this)->for_each_param(
        [&f](const std::string& n, Tensor<T>& t) { f(n, static_cast<const Tensor<T>&>(t)); });
  }
};

template <typename T>
struct PredictorGrads {
  struct Module {
    ConvLstmGrads<T> lstm;
    Tensor<T> pred_w, pred_b, tgt_w, tgt_b;
  };
  std::array<Module, kPredictorModules> mods;

  static PredictorGrads zeros(const PredictorModel<T>& model) {
    PredictorGrads g;
    for (int m = 0; m < kPredictorModules; ++m) {
      g.mods[m].lstm = ConvLstmGrads<T>::zeros(model.mods[m].lstm);
      g.mods[m].pred_w = Tensor<T>::zeros_like(model.mods[m].pred_w);
      g.mods[m].pred_b = Tensor<T>::zeros_like(model.mods[m].pred_b);
      if (m > 0) {
        g.mods[m].tgt_w = Tensor<T>::zeros_like(model.mods[m].tgt_w);
        g.mods[m].tgt_b = Tensor<T>::zeros_like(model.mods[m].tgt_b);
      }
    }
    return g;
  }

  template <typename F>
  void for_each(F&& f) {
    for (int m = 0; m < kPredictorModules; ++m) {
      const std::string p = "mod" + std::to_string(m + 1) + ".";
      f(p + "lstm.wx", mods[m].lstm.wx);
      f(p + "lstm.wh", mods[m].lstm.wh);
      f(p + "lstm.b", mods[m].lstm.b);
      f(p + "pred.w", mods[m].pred_w);
      f(p + "pred.b", mods[m].pred_b);
      if (m > 0) {
        f(p + "tgt.w", mods[m].tgt_w);
        f(p + "tgt.b", mods[m].tgt_b);
      }
    }
  }

  void add(const PredictorGrads& o) {
    for (int m = 0; m < kPredictorModules; ++m) {
      mods[m].lstm.wx += o.mods[m].lstm.wx;
      mods[m].lstm.wh += o.mods[m].lstm.wh;
      mods[m].lstm.b += o.mods[m].lstm.b;
      mods[m].pred_w += o.mods[m].pred_w;
      mods[m].pred_b += o.mods[m].pred_b;
      if (m > 0) {
        mods[m].tgt_w += o.mods[m].tgt_w;
        mods[m].tgt_b += o.mods[m].tgt_b;
      }
    }
  }
  void scale(T s) {
    for (int m = 0; m < kPredictorModules; ++m) {
      mods[m].lstm.wx *= s;
      mods[m].lstm.wh *= s;
      mods[m].lstm.b *= s;
      mods[m].pred_w *= s;
      mods[m].pred_b *= s;
      if (m > 0) {
        mods[m].tgt_w *= s;
        mods[m].tgt_b *= s;
      }
    }
  }
};

template <typename T>
struct PredictorState {
  std::array<Tensor<T>, kPredictorModules> r, c, e;
  int height = 0, width = 0;
  int cycles_run = 0;
  int targets_consumed = 0;

  static PredictorState zeros(const PredictorModel<T>& model, int h, int w) {
    if (h % 8 != 0 || w % 8 != 0)
      throw std::invalid_argument("predictor: input extents must be multiples of 8, got " +
                                  std::to_string(w) + "x" + std::to_string(h));
    PredictorState s;
    s.height = h;
    s.width = w;
    for (int m = 0; m < kPredictorModules; ++m) {
      const int mh = h >> m, mw = w >> m;
      s.r[m] = Tensor<T>({model.channels[m], mh, mw});
      s.c[m] = Tensor<T>({model.channels[m], mh, mw});
      s.e[m] = Tensor<T>({2 * model.channels[m], mh, mw});
    }
    return s;
  }
};

template <typename T>
struct ModuleTape {
  ConvLstmTape<T> lstm;
  Tensor<T> r_cur;     // representation after phase 1
  Tensor<T> pred_pre;  // module 1 only: pre-clamp prediction
  Tensor<T> ahat;      // post-activation prediction
  Tensor<T> e;         // error after phase 2
  Tensor<T> tgt_act;   // modules >= 2: post-relu pre-pool target activation
  std::vector<std::uint8_t> tgt_argmax;
};

template <typename T>
struct CycleTape {
  std::array<ModuleTape<T>, kPredictorModules> mods;
  bool has_frame = false;
};

namespace detail {

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out({a.extent(0) + b.extent(0), a.extent(1), a.extent(2)});
  std::copy(a.data(), a.data() + a.size(), out.data());
  std::copy(b.data(), b.data() + b.size(), out.data() + a.size());
  return out;
}

template <typename T>
Tensor<T> slice_channels(const Tensor<T>& t, int c0, int c1) {
  Tensor<T> out({c1 - c0, t.extent(1), t.extent(2)});
  const std::size_t plane = static_cast<std::size_t>(t.extent(1)) * t.extent(2);
  std::copy(t.data() + c0 * plane, t.data() + c1 * plane, out.data());
  return out;
}

/// E = [relu(pred - target); relu(target - pred)].
template <typename T>
Tensor<T> rectified_error(const Tensor<T>& pred, const Tensor<T>& target) {
  const int c = pred.extent(0);
  Tensor<T> e({2 * c, pred.extent(1), pred.extent(2)});
  const std::size_t n = pred.size();
  for (std::size_t i = 0; i < n; ++i) {
    const T d = pred[i] - target[i];
    e[i] = d > T(0) ? d : T(0);
    e[n + i] = d < T(0) ? -d : T(0);
  }
  return e;
}

}  // namespace detail

/// One recurrent cycle. Pass frame = nullptr for the final cycle of
/// artificial-picture generation: the module-1 prediction is returned and no
/// error update happens. The returned prediction is in [0,1].
template <typename T>
Tensor<T> cycle(const PredictorModel<T>& model, PredictorState<T>& state,
                const Tensor<T>* frame, CycleTape<T>* tape = nullptr) {
  if (frame) {
    if (frame->rank() != 3 || frame->extent(0) != 3)
      throw std::invalid_argument("cycle: frame must have 3 channel planes, got " + frame->shape_str());
    if (frame->extent(1) != state.height || frame->extent(2) != state.width)
      throw std::invalid_argument("cycle: frame extents " + frame->shape_str() +
                                  " do not match state " + std::to_string(state.width) + "x" +
                                  std::to_string(state.height));
  }

  // Phase 1: representation updates, module 4 down to module 1.
  for (int m = kPredictorModules - 1; m >= 0; --m) {
    Tensor<T> x = (m + 1 < kPredictorModules)
                      ? detail::concat_channels(state.e[m], upsample2(state.r[m + 1]))
                      : state.e[m];
    Tensor<T> h_out, c_out;
    convlstm_step(model.mods[m].lstm, x, state.r[m], state.c[m], h_out, c_out,
                  tape ? &tape->mods[m].lstm : nullptr);
    state.r[m] = std::move(h_out);
    state.c[m] = std::move(c_out);
    if (tape) tape->mods[m].r_cur = state.r[m];
  }

  // Phase 2: predictions and errors, module 1 up to module 4.
  Tensor<T> pred_pre = conv2d(state.r[0], model.mods[0].pred_w, model.mods[0].pred_b);
  Tensor<T> prediction = pred_pre;
  clamp01_inplace(prediction);
  if (tape) {
    tape->mods[0].pred_pre = std::move(pred_pre);
    tape->mods[0].ahat = prediction;
    tape->has_frame = frame != nullptr;
  }

  ++state.cycles_run;
  if (!frame) return prediction;

  state.e[0] = detail::rectified_error(prediction, *frame);
  if (tape) tape->mods[0].e = state.e[0];

  for (int m = 1; m < kPredictorModules; ++m) {
    Tensor<T> tgt_act = conv2d(state.e[m - 1], model.mods[m].tgt_w, model.mods[m].tgt_b);
    relu_inplace(tgt_act);
    std::vector<std::uint8_t> argmax;
    Tensor<T> target = maxpool2(tgt_act, &argmax);
    Tensor<T> ahat = conv2d(state.r[m], model.mods[m].pred_w, model.mods[m].pred_b);
    relu_inplace(ahat);
    state.e[m] = detail::rectified_error(ahat, target);
    if (tape) {
      tape->mods[m].tgt_act = std::move(tgt_act);
      tape->mods[m].tgt_argmax = std::move(argmax);
      tape->mods[m].ahat = std::move(ahat);
      tape->mods[m].e = state.e[m];
    }
  }
  ++state.targets_consumed;
  return prediction;
}

/// Mean over space, picture channels and scored cycles of the module-1
/// rectified error. With the two-way rectification this is the mean absolute
/// prediction error. Cycle 1 is never scored (its prediction is empty).
template <typename T>
T snippet_loss(const std::vector<CycleTape<T>>& tapes, int height, int width) {
  const int scored = static_cast<int>(tapes.size()) - 1;
  if (scored < 1) throw std::invalid_argument("loss: need at least 2 cycles, got " +
                                              std::to_string(tapes.size()));
  const T norm = T(1) / (static_cast<T>(height) * static_cast<T>(width) * T(3));
  T total = T(0);
  for (std::size_t c = 1; c < tapes.size(); ++c) {
    if (!tapes[c].has_frame)
      throw std::invalid_argument("loss: scored cycle " + std::to_string(c + 1) + " has no target frame");
    const Tensor<T>& e = tapes[c].mods[0].e;
    T s = T(0);
    for (std::size_t i = 0; i < e.size(); ++i) s += e[i];
    total += s * norm;
  }
  return total / static_cast<T>(scored);
}

template <typename T>
struct SnippetForward {
  std::vector<CycleTape<T>> tapes;
  std::vector<Tensor<T>> predictions;
  T loss = T(0);
};

/// Runs one cycle per frame (every cycle gets a target) and scores cycles
/// 2..K equally.
template <typename T>
SnippetForward<T> forward_snippet(const PredictorModel<T>& model,
                                  const std::vector<Tensor<T>>& frames) {
  if (frames.size() < 2)
    throw std::invalid_argument("forward_snippet: need at least 2 frames, got " +
                                std::to_string(frames.size()));
  SnippetForward<T> fwd;
  PredictorState<T> state = PredictorState<T>::zeros(model, frames[0].extent(1), frames[0].extent(2));
  fwd.tapes.resize(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k)
    fwd.predictions.push_back(cycle(model, state, &frames[k], &fwd.tapes[k]));
  fwd.loss = snippet_loss(fwd.tapes, state.height, state.width);
  return fwd;
}

/// Backpropagation through time over a recorded snippet forward pass.
template <typename T>
PredictorGrads<T> backward_snippet(const PredictorModel<T>& model,
                                   const std::vector<CycleTape<T>>& tapes) {
  PredictorGrads<T> grads = PredictorGrads<T>::zeros(model);
  const int cycles = static_cast<int>(tapes.size());
  const int scored = cycles - 1;
  const int h = tapes[0].mods[0].ahat.extent(1);
  const int w = tapes[0].mods[0].ahat.extent(2);
  const T loss_grad = T(1) / (static_cast<T>(scored) * static_cast<T>(h) * static_cast<T>(w) * T(3));

  // Gradients w.r.t. E_m, R_m, C_m of the cycle currently being unwound.
  std::array<Tensor<T>, kPredictorModules> gE, gR, gC;
  for (int m = 0; m < kPredictorModules; ++m) {
    const int mh = h >> m, mw = w >> m;
    gE[m] = Tensor<T>({2 * model.channels[m], mh, mw});
    gR[m] = Tensor<T>({model.channels[m], mh, mw});
    gC[m] = Tensor<T>({model.channels[m], mh, mw});
  }

  for (int c = cycles - 1; c >= 0; --c) {
    const CycleTape<T>& tp = tapes[c];
    if (!tp.has_frame)
      throw std::invalid_argument("backward_snippet: cycle " + std::to_string(c + 1) +
                                  " was run without a target frame");

    // Phase 2 backward, module 4 down to module 1. Module m's target path
    // feeds gradient into E of module m-1 (same cycle).
    for (int m = kPredictorModules - 1; m >= 0; --m) {
      Tensor<T>& dE = gE[m];
      if (m == 0 && c >= 1) {
        for (std::size_t i = 0; i < dE.size(); ++i) dE[i] += loss_grad;
      }
      const Tensor<T>& e = tp.mods[m].e;
      const std::size_t n = e.size() / 2;
      Tensor<T> dAhat = Tensor<T>::zeros_like(tp.mods[m].ahat);
      Tensor<T> dTarget = Tensor<T>::zeros_like(tp.mods[m].ahat);
      for (std::size_t i = 0; i < n; ++i) {
        const T dpos = e[i] > T(0) ? dE[i] : T(0);
        const T dneg = e[n + i] > T(0) ? dE[n + i] : T(0);
        dAhat[i] = dpos - dneg;
        dTarget[i] = dneg - dpos;
      }
      // Prediction branch.
      if (m == 0)
        clamp01_backward_inplace(dAhat, tp.mods[0].pred_pre);
      else
        relu_backward_inplace(dAhat, tp.mods[m].ahat);
      Tensor<T> dR_pred;
      conv2d_backward(tp.mods[m].r_cur, model.mods[m].pred_w, dAhat, &dR_pred,
                      grads.mods[m].pred_w, grads.mods[m].pred_b);
      gR[m] += dR_pred;
      // Target branch (module 1's target is the raw frame: no gradient).
      if (m > 0) {
        const int ph = tp.mods[m].tgt_act.extent(1);
        const int pw = tp.mods[m].tgt_act.extent(2);
        Tensor<T> dPool = maxpool2_backward(dTarget, tp.mods[m].tgt_argmax, ph, pw);
        relu_backward_inplace(dPool, tp.mods[m].tgt_act);
        Tensor<T> dBelow;
        conv2d_backward(tp.mods[m - 1].e, model.mods[m].tgt_w, dPool, &dBelow,
                        grads.mods[m].tgt_w, grads.mods[m].tgt_b);
        gE[m - 1] += dBelow;
      }
    }

    // Phase 1 backward, module 1 up to module 4 (reverse of the top-down
    // forward order). Module m's ConvLSTM input was
    // concat(E_m^{c-1}, upsample(R_{m+1}^c)).
    std::array<Tensor<T>, kPredictorModules> gE_prev, gR_prev, gC_prev;
    for (int m = 0; m < kPredictorModules; ++m) {
      Tensor<T> dx, dh_prev, dc_prev;
      convlstm_backward(model.mods[m].lstm, tp.mods[m].lstm, gR[m], gC[m],
                        grads.mods[m].lstm, dx, dh_prev, dc_prev);
      const int ec = 2 * model.channels[m];
      if (m + 1 < kPredictorModules) {
        gE_prev[m] = detail::slice_channels(dx, 0, ec);
        Tensor<T> dUp = detail::slice_channels(dx, ec, dx.extent(0));
        gR[m + 1] += upsample2_backward(dUp);
      } else {
        gE_prev[m] = std::move(dx);
      }
      gR_prev[m] = std::move(dh_prev);
      gC_prev[m] = std::move(dc_prev);
    }
    gE = std::move(gE_prev);
    gR = std::move(gR_prev);
    gC = std::move(gC_prev);
  }
  return grads;
}

/// Feeds the references oldest-first, one per cycle, then runs the final
/// cycle without a target; its module-1 prediction is the artificial picture
/// (normalized, in [0,1]). Pure function of (model, refs).
template <typename T>
Tensor<T> predict_from_refs(const PredictorModel<T>& model, const std::vector<Tensor<T>>& refs) {
  if (refs.empty()) throw std::invalid_argument("predict: reference list is empty");
  PredictorState<T> state = PredictorState<T>::zeros(model, refs[0].extent(1), refs[0].extent(2));
  for (const Tensor<T>& ref : refs) cycle(model, state, &ref);
  return cycle<T>(model, state, nullptr);
}

}  // namespace arpvc
