// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arpvc/predictor.hpp"
#include "arpvc/tensor.hpp"

namespace arpvc {

/// Flat archive of named float tensors. Layout, all little-endian:
///   magic "RPF1", u32 tensor count, then per tensor:
///   u32 name length, name bytes, u32 rank, u32 extents[rank], f32 data.
/// Round-trips bit-exactly.
void save_tensor_file(const std::string& path,
                      const std::vector<std::pair<std::string, const Tensor<float>*>>& tensors);
std::vector<std::pair<std::string, Tensor<float>>> load_tensor_file(const std::string& path);

void save_model(const std::string& path, const PredictorModel<float>& model);
PredictorModel<float> load_model(const std::string& path);

}  // namespace arpvc
