// SPDX-License-Identifier: Apache-2.0
#include "arpvc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "arpvc/adam.hpp"
#include "arpvc/util.hpp"

namespace arpvc {

TrainResult train_predictor(const SnippetProvider& provider, std::size_t snippet_count,
                            const TrainConfig& cfg, std::ostream* log) {
  if (snippet_count == 0) throw std::invalid_argument("train: snippet set is empty");
  if (cfg.epochs < 1 || cfg.snippets_per_epoch < 1 || cfg.batch_size < 1)
    throw std::invalid_argument("train: epoch/snippet/batch counts must be positive");

  TrainResult result;
  result.model = PredictorModel<float>::random(cfg.channels, cfg.seed);

  AdamConfig adam_cfg;
  adam_cfg.alpha = cfg.learning_rate;
  AdamOptimizer<float> adam(adam_cfg);
  std::vector<Tensor<float>*> params;
  result.model.for_each_param([&adam, &params](const std::string& name, Tensor<float>& t) {
    adam.register_param(name, t);
    params.push_back(&t);
  });

  std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed ^ 0x5eedu));
  std::vector<std::size_t> order(snippet_count);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // The rate drops by 10x from epoch floor(E/2)+1 on.
  const int drop_epoch = cfg.epochs / 2 + 1;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = epoch < drop_epoch ? cfg.learning_rate : cfg.learning_rate / 10.0;
    adam.set_learning_rate(lr);

    // Random snippet choice for this epoch: a fresh shuffle, with
    // replacement only when more snippets are requested than exist.
    std::vector<std::size_t> chosen(static_cast<std::size_t>(cfg.snippets_per_epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (i < snippet_count)
        chosen[i] = order[i];
      else
        chosen[i] = order[i % snippet_count];
    }

    double epoch_loss = 0.0;
    std::size_t done = 0;
    for (std::size_t b0 = 0; b0 < chosen.size(); b0 += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t bn = std::min(chosen.size() - b0, static_cast<std::size_t>(cfg.batch_size));
      std::vector<PredictorGrads<float>> grads(bn);
      std::vector<float> losses(bn);
      parallel_for(bn, cfg.workers, [&](std::size_t i) {
        const std::vector<Tensor<float>> frames = provider(chosen[b0 + i]);
        SnippetForward<float> fwd = forward_snippet(result.model, frames);
        losses[i] = fwd.loss;
        grads[i] = backward_snippet(result.model, fwd.tapes);
      });
      PredictorGrads<float>& batch = grads[0];
      for (std::size_t i = 1; i < bn; ++i) batch.add(grads[i]);
      batch.scale(1.0f / static_cast<float>(bn));
      for (std::size_t i = 0; i < bn; ++i) {
        if (!std::isfinite(losses[i]))
          throw std::runtime_error("training aborted: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(b0 / cfg.batch_size + 1));
        epoch_loss += losses[i];
      }
      done += bn;

      std::vector<const Tensor<float>*> grad_ptrs;
      batch.for_each([&grad_ptrs](const std::string&, Tensor<float>& t) { grad_ptrs.push_back(&t); });
      adam.step(params, grad_ptrs);
    }

    EpochRecord rec{epoch, epoch_loss / static_cast<double>(done), lr};
    result.history.push_back(rec);
    if (log) {
      char line[128];
      std::snprintf(line, sizeof line, "epoch %3d/%d  mean_loss %.6f  lr %.5g\n", epoch, cfg.epochs,
                    rec.mean_loss, lr);
      (*log) << line << std::flush;
    }
  }
  return result;
}

void write_loss_history_csv(const std::string& path, const std::vector<EpochRecord>& history) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("loss history: cannot open for writing: " + path);
  os << "epoch,mean_loss,learning_rate\n";
  char line[96];
  for (const EpochRecord& r : history) {
    std::snprintf(line, sizeof line, "%d,%.8f,%.8g\n", r.epoch, r.mean_loss, r.learning_rate);
    os << line;
  }
}

}  // namespace arpvc
