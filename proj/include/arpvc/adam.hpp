// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "arpvc/tensor.hpp"

namespace arpvc {

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam. One slot per parameter tensor, registered once in a
/// fixed order so updates are run-to-run deterministic.
template <typename T>
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

  void register_param(const std::string& name, const Tensor<T>& shape_like) {
    slots_.push_back({name, Tensor<T>::zeros_like(shape_like), Tensor<T>::zeros_like(shape_like)});
  }

  std::size_t num_params() const { return slots_.size(); }
  long step_count() const { return t_; }
  double learning_rate() const { return cfg_.alpha; }
  void set_learning_rate(double a) { cfg_.alpha = a; }

  /// params/grads must be passed in registration order.
  void step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads) {
    if (params.size() != slots_.size() || grads.size() != slots_.size())
      throw std::invalid_argument("adam: parameter list does not match registered slots");
    ++t_;
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    const T corr1 = static_cast<T>(1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
    const T corr2 = static_cast<T>(1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
    const T lr = static_cast<T>(cfg_.alpha);
    const T eps = static_cast<T>(cfg_.eps);
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      Slot& slot = slots_[s];
      Tensor<T>& p = *params[s];
      const Tensor<T>& g = *grads[s];
      if (!p.same_shape(slot.m) || !g.same_shape(slot.m))
        throw std::invalid_argument("adam: shape mismatch for parameter " + slot.name);
      if (!all_finite(g))
        throw std::runtime_error("adam: non-finite gradient for parameter " + slot.name);
      for (std::size_t i = 0; i < p.size(); ++i) {
        slot.m[i] = b1 * slot.m[i] + (T(1) - b1) * g[i];
        slot.v[i] = b2 * slot.v[i] + (T(1) - b2) * g[i] * g[i];
        const T mhat = slot.m[i] / corr1;
        const T vhat = slot.v[i] / corr2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    }
  }

 private:
  struct Slot {
    std::string name;
    Tensor<T> m, v;
  };
  AdamConfig cfg_;
  std::vector<Slot> slots_;
  long t_ = 0;
};

}  // namespace arpvc
