// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "arpvc/bdrate.hpp"
#include "arpvc/codec.hpp"
#include "arpvc/picture.hpp"
#include "arpvc/predictor.hpp"

namespace arpvc {

// Experiment drivers shared by the CLI subcommands and the acceptance suite.

struct CorpusConfig {
  std::string out_dir;
  int train_count = 200;
  int holdout_count = 50;
  int width = 64, height = 64;
  int frames = 9;
  std::uint64_t seed = 1;
  double max_speed = 2.6;
  bool fractional = true;
};

struct CorpusPaths {
  std::vector<std::string> train, holdout;
  std::string train_list, holdout_list;
};

/// Writes <out>/train_###.yuv and <out>/holdout_###.yuv plus their spec
/// files and the two sequence lists.
CorpusPaths generate_corpus(const CorpusConfig& cfg);

/// Cuts each input sequence into 5-frame snippet files and writes a manifest
/// listing them.
std::vector<std::string> write_snippet_files(const std::vector<std::string>& sequence_paths,
                                             int width, int height, int stride,
                                             const std::string& out_dir,
                                             const std::string& manifest_path);

std::vector<Snippet> load_snippets(const std::vector<std::string>& paths, int width, int height);

struct PredictorChoice {
  enum class Kind { None, Model, Oracle };
  Kind kind = Kind::None;
  PredictorModel<float> model;  // used when kind == Model

  static PredictorChoice none() { return {}; }
  static PredictorChoice from_model(PredictorModel<float> m) {
    PredictorChoice c;
    c.kind = Kind::Model;
    c.model = std::move(m);
    return c;
  }
  static PredictorChoice oracle() {
    PredictorChoice c;
    c.kind = Kind::Oracle;
    return c;
  }
};

struct QualityRow {
  std::string label;
  double mse = 0.0;
  double ssim = 0.0;
};

/// Mean MSE/SSIM of each conventional reference and of the artificial
/// picture against the true t0 over a snippet set. MSE/SSIM are computed on
/// luma; all_planes extends the MSE to chroma.
std::vector<QualityRow> reference_quality_table(const std::vector<Snippet>& snippets,
                                                const PredictorChoice& choice,
                                                bool all_planes = false);
std::string format_quality_table(const std::vector<QualityRow>& rows);

struct AbSequenceRow {
  std::string name;
  double y = 0, cb = 0, cr = 0, weighted = 0;
  bool valid = false;
  std::string note;
};

struct AbTestConfig {
  std::vector<std::string> sequence_paths;
  int width = 0, height = 0;
  std::vector<int> qps{22, 27, 32, 37};
  int search_range = 16;
  std::string out_dir;  // empty: no files written
  int workers = 0;
  bool verify_decode = true;
};

struct AbTestReport {
  std::vector<AbSequenceRow> rows;
  AbSequenceRow mean;
  std::string text;
  // rd[s][m][q]: sequence s, mode m (0 conventional, 1 replace-t4), QP q
  std::vector<std::array<std::vector<RDPoint>, 2>> rd;
};

/// Encodes every sequence at all QPs in both modes, computes per-plane
/// BD-rates of replace-t4 against conventional and the 6/1/1 weighted
/// average, and emits a report table. Decoding is verified bit-exact against
/// the encoder reconstruction when verify_decode is set.
AbTestReport run_ab_test(const AbTestConfig& cfg, const PredictorChoice& choice);

}  // namespace arpvc
