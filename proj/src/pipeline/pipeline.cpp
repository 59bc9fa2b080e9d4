// SPDX-License-Identifier: Apache-2.0
#include "arpvc/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arpvc/metrics.hpp"
#include "arpvc/synth.hpp"
#include "arpvc/util.hpp"
#include "arpvc/videoio.hpp"

namespace fs = std::filesystem;

namespace arpvc {

namespace {

std::string seq_name(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  return stem.empty() ? path : stem;
}

std::unique_ptr<ArtificialSource> make_source(const PredictorChoice& choice,
                                              const std::vector<Picture>* originals) {
  switch (choice.kind) {
    case PredictorChoice::Kind::Model:
      return std::make_unique<ModelSource>(choice.model);
    case PredictorChoice::Kind::Oracle:
      return std::make_unique<OracleSource>(originals);
    case PredictorChoice::Kind::None:
      return nullptr;
  }
  return nullptr;
}

}  // namespace

CorpusPaths generate_corpus(const CorpusConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  CorpusPaths out;
  std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed));
  const auto make_set = [&](const char* prefix, int count, std::vector<std::string>& paths) {
    std::ostringstream list;
    for (int i = 0; i < count; ++i) {
      RandomSpecOptions opt;
      opt.max_speed = cfg.max_speed;
      opt.fractional = cfg.fractional;
      opt.occlusion = i % 4 == 3;  // a quarter of the set has crossing objects
      SyntheticSpec spec = random_spec(cfg.width, cfg.height, cfg.frames, rng, opt);
      char name[64];
      std::snprintf(name, sizeof name, "%s_%03d", prefix, i);
      const std::string base = (fs::path(cfg.out_dir) / name).string();
      const std::uint64_t seq_seed = cfg.seed * 1000003ull + static_cast<std::uint64_t>(i) +
                                     (prefix[0] == 'h' ? 0x800000ull : 0);
      write_raw_video(base + ".yuv", synthesize(spec, seq_seed));
      write_text_file(base + ".spec.txt", spec.to_text());
      paths.push_back(base + ".yuv");
      list << base << ".yuv\n";
    }
    const std::string list_path = (fs::path(cfg.out_dir) / (std::string(prefix) + ".txt")).string();
    write_text_file(list_path, list.str());
    return list_path;
  };
  out.train_list = make_set("train", cfg.train_count, out.train);
  out.holdout_list = make_set("holdout", cfg.holdout_count, out.holdout);
  return out;
}

std::vector<std::string> write_snippet_files(const std::vector<std::string>& sequence_paths,
                                             int width, int height, int stride,
                                             const std::string& out_dir,
                                             const std::string& manifest_path) {
  fs::create_directories(out_dir);
  std::vector<std::string> snippet_paths;
  std::ostringstream manifest;
  for (const std::string& seq_path : sequence_paths) {
    const std::vector<Picture> frames = read_raw_video(seq_path, width, height);
    const std::vector<Snippet> snippets = extract_snippets(frames, stride);
    for (std::size_t s = 0; s < snippets.size(); ++s) {
      char name[160];
      std::snprintf(name, sizeof name, "%s_s%02zu.yuv", seq_name(seq_path).c_str(), s);
      const std::string path = (fs::path(out_dir) / name).string();
      std::vector<Picture> five(snippets[s].frames.begin(), snippets[s].frames.end());
      write_raw_video(path, five);
      snippet_paths.push_back(path);
      manifest << path << "\n";
    }
  }
  write_text_file(manifest_path, manifest.str());
  return snippet_paths;
}

std::vector<Snippet> load_snippets(const std::vector<std::string>& paths, int width, int height) {
  std::vector<Snippet> out;
  out.reserve(paths.size());
  for (const std::string& p : paths) {
    const std::vector<Picture> frames = read_raw_video(p, width, height);
    if (frames.size() != 5)
      throw std::runtime_error("snippet file " + p + " has " + std::to_string(frames.size()) +
                               " frames, expected 5");
    Snippet s;
    for (int k = 0; k < 5; ++k) s.frames[k] = frames[static_cast<std::size_t>(k)];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<QualityRow> reference_quality_table(const std::vector<Snippet>& snippets,
                                                const PredictorChoice& choice, bool all_planes) {
  if (snippets.empty()) throw std::invalid_argument("table1: snippet set is empty");
  if (choice.kind == PredictorChoice::Kind::None)
    throw std::invalid_argument("table1: a predictor (model or oracle) is required");
  std::vector<QualityRow> rows(5);
  const char* labels[5] = {"t-4", "t-3", "t-2", "t-1", "t0 (artificial)"};
  for (int i = 0; i < 5; ++i) rows[static_cast<std::size_t>(i)].label = labels[i];

  std::vector<std::array<double, 10>> partial(snippets.size());
  parallel_for(snippets.size(), 0, [&](std::size_t s) {
    const Snippet& snip = snippets[s];
    const Picture& target = snip.frames[4];
    std::array<double, 10> acc{};
    for (int k = 0; k < 4; ++k) {
      acc[static_cast<std::size_t>(2 * k)] = all_planes
                                                 ? picture_mse_all_planes(snip.frames[k], target)
                                                 : picture_mse_luma(snip.frames[k], target);
      acc[static_cast<std::size_t>(2 * k + 1)] = picture_ssim_luma(snip.frames[k], target);
    }
    Picture artificial;
    if (choice.kind == PredictorChoice::Kind::Oracle) {
      artificial = target;
    } else {
      const std::vector<const Picture*> refs{&snip.frames[0], &snip.frames[1], &snip.frames[2],
                                             &snip.frames[3]};
      artificial = predict_artificial(choice.model, refs);
    }
    acc[8] = all_planes ? picture_mse_all_planes(artificial, target)
                        : picture_mse_luma(artificial, target);
    acc[9] = picture_ssim_luma(artificial, target);
    partial[s] = acc;
  });
  for (const auto& acc : partial) {
    for (int i = 0; i < 5; ++i) {
      rows[static_cast<std::size_t>(i)].mse += acc[static_cast<std::size_t>(2 * i)];
      rows[static_cast<std::size_t>(i)].ssim += acc[static_cast<std::size_t>(2 * i + 1)];
    }
  }
  for (QualityRow& r : rows) {
    r.mse /= static_cast<double>(snippets.size());
    r.ssim /= static_cast<double>(snippets.size());
  }
  return rows;
}

std::string format_quality_table(const std::vector<QualityRow>& rows) {
  std::ostringstream os;
  os << "Reference picture      MSE     SSIM\n";
  char line[96];
  for (const QualityRow& r : rows) {
    std::snprintf(line, sizeof line, "%-18s %8.1f   %6.4f\n", r.label.c_str(), r.mse, r.ssim);
    os << line;
  }
  return os.str();
}

AbTestReport run_ab_test(const AbTestConfig& cfg, const PredictorChoice& choice) {
  if (cfg.sequence_paths.empty()) throw std::invalid_argument("ab-test: no sequences given");
  if (cfg.qps.size() < 4)
    throw std::invalid_argument("ab-test: need at least 4 QPs for BD-rate, got " +
                                std::to_string(cfg.qps.size()));
  if (choice.kind == PredictorChoice::Kind::None)
    throw std::invalid_argument("ab-test: a predictor (model or oracle) is required");

  const std::size_t n_seq = cfg.sequence_paths.size();
  std::vector<std::vector<Picture>> sequences(n_seq);
  for (std::size_t s = 0; s < n_seq; ++s)
    sequences[s] = read_raw_video(cfg.sequence_paths[s], cfg.width, cfg.height);

  AbTestReport report;
  report.rd.assign(n_seq, {});
  for (std::size_t s = 0; s < n_seq; ++s) {
    report.rd[s][0].resize(cfg.qps.size());
    report.rd[s][1].resize(cfg.qps.size());
  }

  // One job per (sequence, mode, qp); results land in fixed slots.
  const std::size_t jobs = n_seq * 2 * cfg.qps.size();
  parallel_for(jobs, cfg.workers, [&](std::size_t j) {
    const std::size_t s = j / (2 * cfg.qps.size());
    const std::size_t rest = j % (2 * cfg.qps.size());
    const int mode_idx = static_cast<int>(rest / cfg.qps.size());
    const std::size_t q = rest % cfg.qps.size();
    SequenceCodingConfig scfg;
    scfg.qp = cfg.qps[q];
    scfg.mode = mode_idx == 0 ? CodingMode::Conventional : CodingMode::ReplaceT4;
    scfg.search_range = cfg.search_range;
    std::unique_ptr<ArtificialSource> source =
        scfg.mode == CodingMode::ReplaceT4 ? make_source(choice, &sequences[s]) : nullptr;
    SequenceResult res = code_sequence(sequences[s], scfg, source.get());
    if (cfg.verify_decode) {
      std::unique_ptr<ArtificialSource> dec_source =
          scfg.mode == CodingMode::ReplaceT4 ? make_source(choice, &sequences[s]) : nullptr;
      const std::vector<Picture> decoded = decode_sequence(res.stream, dec_source.get());
      for (std::size_t p = 0; p < decoded.size(); ++p)
        if (!(decoded[p] == res.recon[p]))
          throw std::runtime_error("ab-test: decoder mismatch on " + cfg.sequence_paths[s] +
                                   " qp " + std::to_string(scfg.qp) + " picture " +
                                   std::to_string(p));
    }
    report.rd[s][static_cast<std::size_t>(mode_idx)][q] = res.rd;
  });

  // Per-sequence BD rates and the corpus mean.
  double sums[4] = {0, 0, 0, 0};
  int valid_rows = 0;
  for (std::size_t s = 0; s < n_seq; ++s) {
    const BdReport bd = bd_report(report.rd[s][0], report.rd[s][1]);
    AbSequenceRow row;
    row.name = seq_name(cfg.sequence_paths[s]);
    row.valid = bd.valid;
    row.note = bd.note;
    if (bd.valid) {
      row.y = bd.y.percent;
      row.cb = bd.cb.percent;
      row.cr = bd.cr.percent;
      row.weighted = bd.weighted;
      sums[0] += row.y;
      sums[1] += row.cb;
      sums[2] += row.cr;
      sums[3] += row.weighted;
      ++valid_rows;
    }
    report.rows.push_back(std::move(row));
  }
  report.mean.name = "Mean";
  report.mean.valid = valid_rows > 0;
  if (valid_rows > 0) {
    report.mean.y = sums[0] / valid_rows;
    report.mean.cb = sums[1] / valid_rows;
    report.mean.cr = sums[2] / valid_rows;
    report.mean.weighted = sums[3] / valid_rows;
  }

  // Table with the Y / Cb / Cr / Weighted column layout.
  std::ostringstream os;
  os << "BD-rates of replace-t4 against conventional (negative = rate saved)\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s\n", "Video", "Y", "Cb", "Cr", "Weighted");
  os << line;
  const auto put_row = [&os, &line](const AbSequenceRow& r) {
    if (r.valid)
      std::snprintf(line, sizeof line, "%-16s %8.2f%% %8.2f%% %8.2f%% %8.2f%%\n", r.name.c_str(),
                    r.y, r.cb, r.cr, r.weighted);
    else
      std::snprintf(line, sizeof line, "%-16s %s\n", r.name.c_str(), r.note.c_str());
    os << line;
  };
  for (const AbSequenceRow& r : report.rows) put_row(r);
  put_row(report.mean);
  report.text = os.str();

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::ostringstream csv;
    csv << "video,bd_y,bd_cb,bd_cr,bd_weighted\n";
    const auto csv_row = [&csv, &line](const AbSequenceRow& r) {
      if (r.valid)
        std::snprintf(line, sizeof line, "%s,%.6f,%.6f,%.6f,%.6f\n", r.name.c_str(), r.y, r.cb,
                      r.cr, r.weighted);
      else
        std::snprintf(line, sizeof line, "%s,,,,%s\n", r.name.c_str(), r.note.c_str());
      csv << line;
    };
    for (const AbSequenceRow& r : report.rows) csv_row(r);
    csv_row(report.mean);
    write_text_file((fs::path(cfg.out_dir) / "report.csv").string(), csv.str());
    write_text_file((fs::path(cfg.out_dir) / "report.txt").string(), report.text);
    for (std::size_t s = 0; s < n_seq; ++s) {
      const std::string base = seq_name(cfg.sequence_paths[s]);
      write_rd_csv((fs::path(cfg.out_dir) / (base + "_conventional.csv")).string(),
                   report.rd[s][0]);
      write_rd_csv((fs::path(cfg.out_dir) / (base + "_replace-t4.csv")).string(), report.rd[s][1]);
    }
  }
  return report;
}

}  // namespace arpvc
