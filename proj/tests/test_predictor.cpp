// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "arpvc/predictor.hpp"
#include "arpvc/trainer.hpp"
#include "finite_diff.hpp"

using namespace arpvc;

namespace {

constexpr std::array<int, 4> kTinyPlan{3, 4, 8, 16};

Tensor<float> random_frame(int h, int w, std::mt19937& rng) {
  Tensor<float> t({3, h, w});
  fill_uniform(t, 0.0f, 1.0f, rng);
  return t;
}

Tensor<double> random_frame_d(int h, int w, std::mt19937& rng) {
  Tensor<double> t({3, h, w});
  fill_uniform(t, 0.0, 1.0, rng);
  return t;
}

}  // namespace

TEST_CASE("cycle count: R references run R+1 cycles and consume R targets") {
  for (int refs = 1; refs <= 4; ++refs) {
    PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 3);
    PredictorState<float> state = PredictorState<float>::zeros(model, 16, 16);
    std::mt19937 rng(refs);
    for (int k = 0; k < refs; ++k) {
      const Tensor<float> frame = random_frame(16, 16, rng);
      cycle(model, state, &frame);
    }
    cycle<float>(model, state, nullptr);  // final cycle emits the prediction
    CHECK(state.cycles_run == refs + 1);
    CHECK(state.targets_consumed == refs);
  }
}

TEST_CASE("first-cycle prediction is empty (all zero)") {
  SUBCASE("zero model") {
    PredictorModel<float> model = PredictorModel<float>::zeros(kTinyPlan);
    PredictorState<float> state = PredictorState<float>::zeros(model, 16, 16);
    std::mt19937 rng(4);
    const Tensor<float> frame = random_frame(16, 16, rng);
    const Tensor<float> pred = cycle(model, state, &frame);
    for (std::size_t i = 0; i < pred.size(); ++i) CHECK(pred[i] == 0.0f);
  }
  SUBCASE("random weights, zero biases") {
    PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 17);
    PredictorState<float> state = PredictorState<float>::zeros(model, 16, 16);
    std::mt19937 rng(5);
    const Tensor<float> frame = random_frame(16, 16, rng);
    const Tensor<float> pred = cycle(model, state, &frame);
    for (std::size_t i = 0; i < pred.size(); ++i) CHECK(pred[i] == 0.0f);
  }
}

TEST_CASE("module grids halve per level") {
  PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 6);
  PredictorState<float> state = PredictorState<float>::zeros(model, 48, 64);
  for (int m = 0; m < kPredictorModules; ++m) {
    CHECK(state.r[m].extent(1) == 48 >> m);
    CHECK(state.r[m].extent(2) == 64 >> m);
  }
  // QCIF: 176x144 input runs modules at 176x144, 88x72, 44x36, 22x18
  PredictorState<float> qcif = PredictorState<float>::zeros(model, 144, 176);
  CHECK(qcif.r[1].extent(1) == 72);
  CHECK(qcif.r[1].extent(2) == 88);
  CHECK(qcif.r[3].extent(1) == 18);
  CHECK(qcif.r[3].extent(2) == 22);
  CHECK_THROWS_AS(PredictorState<float>::zeros(model, 20, 64), std::invalid_argument);
}

TEST_CASE("frame dimension mismatch is rejected") {
  PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 6);
  PredictorState<float> state = PredictorState<float>::zeros(model, 16, 16);
  std::mt19937 rng(6);
  const Tensor<float> frame = random_frame(24, 16, rng);
  CHECK_THROWS_AS(cycle(model, state, &frame), std::invalid_argument);
}

TEST_CASE("errors stay nonnegative after every cycle") {
  PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 7);
  PredictorState<float> state = PredictorState<float>::zeros(model, 16, 16);
  std::mt19937 rng(8);
  for (int k = 0; k < 5; ++k) {
    const Tensor<float> frame = random_frame(16, 16, rng);
    cycle(model, state, &frame);
    for (int m = 0; m < kPredictorModules; ++m)
      for (std::size_t i = 0; i < state.e[m].size(); ++i) CHECK(state.e[m][i] >= 0.0f);
  }
}

TEST_CASE("loss values") {
  SUBCASE("prediction equal to target gives zero loss") {
    PredictorModel<float> model = PredictorModel<float>::zeros(kTinyPlan);
    std::vector<Tensor<float>> frames(2, Tensor<float>({3, 16, 16}));  // all-zero targets
    const SnippetForward<float> fwd = forward_snippet(model, frames);
    CHECK(fwd.loss == 0.0f);
  }
  SUBCASE("zero prediction against constant target c gives loss c") {
    PredictorModel<float> model = PredictorModel<float>::zeros(kTinyPlan);
    const float c = 0.37f;
    std::vector<Tensor<float>> frames(2, Tensor<float>({3, 16, 16}));
    frames[1].fill(c);
    const SnippetForward<float> fwd = forward_snippet(model, frames);
    CHECK(fwd.loss == doctest::Approx(c).epsilon(1e-4));
  }
  SUBCASE("loss is nonnegative") {
    PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 9);
    std::mt19937 rng(10);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Tensor<float>> frames;
      for (int k = 0; k < 5; ++k) frames.push_back(random_frame(16, 16, rng));
      CHECK(forward_snippet(model, frames).loss >= 0.0f);
    }
  }
}

TEST_CASE("predict_from_refs is pure and in range") {
  PredictorModel<float> model = PredictorModel<float>::random(kTinyPlan, 11);
  std::mt19937 rng(12);
  std::vector<Tensor<float>> refs;
  for (int k = 0; k < 4; ++k) refs.push_back(random_frame(16, 24, rng));
  const Tensor<float> p1 = predict_from_refs(model, refs);
  const Tensor<float> p2 = predict_from_refs(model, refs);
  CHECK(p1.shape() == std::vector<int>{3, 16, 24});
  CHECK(std::memcmp(p1.data(), p2.data(), p1.size() * sizeof(float)) == 0);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i] >= 0.0f);
    CHECK(p1[i] <= 1.0f);
  }
  CHECK_THROWS_AS(predict_from_refs(model, {}), std::invalid_argument);
}

TEST_CASE("full-network gradients match finite differences (tiny config)") {
  PredictorModel<double> model = PredictorModel<double>::random(kTinyPlan, 13);
  std::mt19937 rng(14);
  // Randomize the biases as well: with everything zero-initialized the
  // first-cycle pre-activations sit exactly on the relu/clamp kinks, where
  // central differences are not valid.
  model.for_each_param([&rng](const std::string&, Tensor<double>& t) {
    if (t.rank() == 1) fill_uniform(t, -0.3, 0.3, rng);
  });
  std::vector<Tensor<double>> frames;
  for (int k = 0; k < 2; ++k) frames.push_back(random_frame_d(16, 16, rng));

  const auto loss = [&]() { return static_cast<double>(forward_snippet(model, frames).loss); };
  const SnippetForward<double> fwd = forward_snippet(model, frames);
  PredictorGrads<double> grads = backward_snippet(model, fwd.tapes);

  double worst = 0.0;
  grads.for_each([&](const std::string& name, Tensor<double>& g) {
    Tensor<double>* param = nullptr;
    model.for_each_param([&](const std::string& n, Tensor<double>& p) {
      if (n == name) param = &p;
    });
    REQUIRE(param != nullptr);
    const double err = testutil::max_grad_rel_err(*param, g, loss, 6, rng, 1e-5);
    if (err > worst) worst = err;
  });
  CHECK(worst < 1e-4);
}

TEST_CASE("training on constant snippets converges to the constant frame") {
  std::mt19937 rng(15);
  const float levels[4] = {0.25f, 0.5f, 0.66f, 0.85f};
  const auto provider = [&levels](std::size_t index) {
    std::vector<Tensor<float>> frames;
    for (int k = 0; k < 5; ++k) {
      Tensor<float> f({3, 16, 16});
      f.fill(levels[index % 4]);
      frames.push_back(std::move(f));
    }
    return frames;
  };
  TrainConfig cfg;
  cfg.channels = kTinyPlan;
  cfg.epochs = 70;
  cfg.snippets_per_epoch = 16;
  cfg.batch_size = 4;
  cfg.learning_rate = 8e-3;  // toy problem; the bias has to travel far from 0
  cfg.seed = 16;
  const TrainResult result = train_predictor(provider, 4, cfg);

  for (int i = 0; i < 4; ++i) {
    std::vector<Tensor<float>> refs;
    for (int k = 0; k < 4; ++k) {
      Tensor<float> f({3, 16, 16});
      f.fill(levels[i]);
      refs.push_back(std::move(f));
    }
    const Tensor<float> pred = predict_from_refs(result.model, refs);
    double mse = 0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double d = pred[j] - levels[i];
      mse += d * d;
    }
    mse /= static_cast<double>(pred.size());
    CHECK(mse < 1e-3);
  }
}

TEST_CASE("training is reproducible and follows the learning-rate schedule") {
  std::mt19937 rng(17);
  std::vector<std::vector<Tensor<float>>> bank;
  for (int s = 0; s < 6; ++s) {
    std::vector<Tensor<float>> frames;
    for (int k = 0; k < 5; ++k) frames.push_back(random_frame(16, 16, rng));
    bank.push_back(std::move(frames));
  }
  const auto provider = [&bank](std::size_t i) { return bank[i % bank.size()]; };

  TrainConfig cfg;
  cfg.channels = kTinyPlan;
  cfg.epochs = 6;
  cfg.snippets_per_epoch = 4;
  cfg.batch_size = 2;
  cfg.seed = 18;
  const TrainResult a = train_predictor(provider, bank.size(), cfg);
  const TrainResult b = train_predictor(provider, bank.size(), cfg);

  bool identical = true;
  a.model.for_each_param([&](const std::string& name, const Tensor<float>& t) {
    b.model.for_each_param([&](const std::string& name2, const Tensor<float>& t2) {
      if (name != name2) return;
      if (std::memcmp(t.data(), t2.data(), t.size() * sizeof(float)) != 0) identical = false;
    });
  });
  CHECK(identical);

  REQUIRE(a.history.size() == 6);
  // drop at floor(6/2)+1 = 4
  CHECK(a.history[0].learning_rate == doctest::Approx(1e-3));
  CHECK(a.history[2].learning_rate == doctest::Approx(1e-3));
  CHECK(a.history[3].learning_rate == doctest::Approx(1e-4));
  CHECK(a.history[5].learning_rate == doctest::Approx(1e-4));
}

TEST_CASE("a short training run reduces the loss on its data") {
  std::mt19937 rng(19);
  // Slowly varying content: a horizontally shifting ramp.
  const auto make_frame = [&](int t) {
    Tensor<float> f({3, 16, 16});
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const float v = 0.5f + 0.4f * std::sin(2.0f * 3.14159f * (x + 2 * t) / 16.0f);
        f.at(0, y, x) = v;
        f.at(1, y, x) = 0.5f;
        f.at(2, y, x) = 0.5f;
      }
    return f;
  };
  const auto provider = [&](std::size_t) {
    std::vector<Tensor<float>> frames;
    for (int k = 0; k < 5; ++k) frames.push_back(make_frame(k));
    return frames;
  };
  TrainConfig cfg;
  cfg.channels = kTinyPlan;
  cfg.epochs = 20;
  cfg.snippets_per_epoch = 8;
  cfg.batch_size = 4;
  cfg.seed = 20;
  const TrainResult result = train_predictor(provider, 4, cfg);
  CHECK(result.history.back().mean_loss < result.history.front().mean_loss);
}
