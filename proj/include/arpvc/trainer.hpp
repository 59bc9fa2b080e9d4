// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "arpvc/predictor.hpp"

namespace arpvc {

struct TrainConfig {
  std::array<int, kPredictorModules> channels{3, 48, 96, 192};
  int epochs = 150;
  int snippets_per_epoch = 1000;
  int batch_size = 4;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = auto
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  PredictorModel<float> model;
  std::vector<EpochRecord> history;
};

/// Returns the 5 normalized frames of snippet `index`.
using SnippetProvider = std::function<std::vector<Tensor<float>>(std::size_t index)>;

/// Adam training over randomly chosen snippets per epoch; the learning rate
/// drops by 10x after the first half of the epochs. Gradients within a batch
/// are averaged in a fixed order, so results are reproducible for a given
/// seed regardless of worker count.
TrainResult train_predictor(const SnippetProvider& provider, std::size_t snippet_count,
                            const TrainConfig& cfg, std::ostream* log = nullptr);

void write_loss_history_csv(const std::string& path, const std::vector<EpochRecord>& history);

}  // namespace arpvc
