// SPDX-License-Identifier: Apache-2.0
//
// arpvc - artificial-reference-picture video coding toolkit.
// One executable, one subcommand per pipeline stage; every run writes a
// manifest.txt echoing its resolved configuration into --out.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "arpvc/bdrate.hpp"
#include "arpvc/codec.hpp"
#include "arpvc/metrics.hpp"
#include "arpvc/pipeline.hpp"
#include "arpvc/synth.hpp"
#include "arpvc/trainer.hpp"
#include "arpvc/util.hpp"
#include "arpvc/videoio.hpp"
#include "arpvc/weights_io.hpp"

namespace fs = std::filesystem;
using namespace arpvc;

namespace {

struct Size {
  int w = 0, h = 0;
};

Size parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos)
    throw CLI::ValidationError("--size", "expected WxH, got '" + s + "'");
  Size out;
  out.w = std::stoi(s.substr(0, x));
  out.h = std::stoi(s.substr(x + 1));
  return out;
}

std::array<int, 4> parse_channels(const std::string& s) {
  std::array<int, 4> ch{};
  std::istringstream is(s);
  std::string tok;
  int i = 0;
  while (std::getline(is, tok, ',')) {
    if (i >= 4) throw CLI::ValidationError("--channels", "expected 4 comma-separated counts");
    ch[static_cast<std::size_t>(i++)] = std::stoi(tok);
  }
  if (i != 4) throw CLI::ValidationError("--channels", "expected 4 comma-separated counts");
  return ch;
}

std::vector<int> parse_qps(const std::string& s) {
  std::vector<int> qps;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) qps.push_back(std::stoi(tok));
  return qps;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out(const std::string& dir) { fs::create_directories(dir); }

PredictorChoice load_choice(const std::string& model_path, bool oracle, bool required) {
  if (oracle && !model_path.empty())
    throw CLI::ValidationError("--oracle", "pass either --model or --oracle, not both");
  if (oracle) return PredictorChoice::oracle();
  if (!model_path.empty()) return PredictorChoice::from_model(load_model(model_path));
  if (required)
    throw CLI::ValidationError("--model", "configuration error: a model (or --oracle) is required");
  return PredictorChoice::none();
}

// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out, int train, int holdout, const Size& size, int frames,
              std::uint64_t seed, double max_speed, const std::string& spec_path) {
  ensure_out(out);
  if (!spec_path.empty()) {
    const SyntheticSpec spec = SyntheticSpec::parse(read_text_file(spec_path));
    const std::string path = join_path(out, "sequence.yuv");
    write_raw_video(path, synthesize(spec, seed));
    write_manifest(join_path(out, "manifest.txt"),
                   {{"command", "synth"},
                    {"spec", spec_path},
                    {"seed", std::to_string(seed)},
                    {"output", path}});
    std::printf("wrote %s (%dx%d, %d frames)\n", path.c_str(), spec.width, spec.height,
                spec.frames);
    return 0;
  }
  CorpusConfig cfg;
  cfg.out_dir = out;
  cfg.train_count = train;
  cfg.holdout_count = holdout;
  cfg.width = size.w;
  cfg.height = size.h;
  cfg.frames = frames;
  cfg.seed = seed;
  cfg.max_speed = max_speed;
  const CorpusPaths paths = generate_corpus(cfg);
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "synth"},
                  {"train_count", std::to_string(train)},
                  {"holdout_count", std::to_string(holdout)},
                  {"size", std::to_string(size.w) + "x" + std::to_string(size.h)},
                  {"frames", std::to_string(frames)},
                  {"seed", std::to_string(seed)},
                  {"max_speed", std::to_string(max_speed)},
                  {"train_list", paths.train_list},
                  {"holdout_list", paths.holdout_list}});
  std::printf("wrote %zu training and %zu held-out sequences under %s\n", paths.train.size(),
              paths.holdout.size(), out.c_str());
  return 0;
}

int cmd_snippets(const std::string& list, const std::string& input, const Size& size, int stride,
                 const std::string& out) {
  ensure_out(out);
  std::vector<std::string> seqs;
  if (!input.empty()) seqs.push_back(input);
  if (!list.empty())
    for (const std::string& line : read_lines(list)) seqs.push_back(line);
  if (seqs.empty()) throw CLI::ValidationError("snippets", "need --list or --input");
  const std::string manifest = join_path(out, "snippets.txt");
  const auto paths = write_snippet_files(seqs, size.w, size.h, stride, out, manifest);
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "snippets"},
                  {"sequences", std::to_string(seqs.size())},
                  {"size", std::to_string(size.w) + "x" + std::to_string(size.h)},
                  {"stride", std::to_string(stride)},
                  {"snippets", std::to_string(paths.size())},
                  {"snippet_list", manifest}});
  std::printf("wrote %zu snippets, manifest %s\n", paths.size(), manifest.c_str());
  return 0;
}

int cmd_train(const std::string& manifest, const Size& size, const std::string& channels,
              int epochs, int spe, int batch, double lr, std::uint64_t seed, int workers,
              const std::string& out) {
  ensure_out(out);
  const std::vector<std::string> snippet_paths = read_lines(manifest);
  if (snippet_paths.empty()) throw std::runtime_error("train: snippet manifest is empty");

  // Snippets are small; load them once up front.
  std::vector<std::vector<Tensor<float>>> bank;
  bank.reserve(snippet_paths.size());
  for (const std::string& p : snippet_paths) {
    const std::vector<Picture> frames = read_raw_video(p, size.w, size.h);
    if (frames.size() != 5)
      throw std::runtime_error("train: snippet " + p + " has " + std::to_string(frames.size()) +
                               " frames, expected 5");
    std::vector<Tensor<float>> tensors;
    for (const Picture& f : frames) tensors.push_back(picture_to_tensor(f));
    bank.push_back(std::move(tensors));
  }

  TrainConfig cfg;
  cfg.channels = parse_channels(channels);
  cfg.epochs = epochs;
  cfg.snippets_per_epoch = spe;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.seed = seed;
  cfg.workers = workers;
  const TrainResult result =
      train_predictor([&bank](std::size_t i) { return bank[i]; }, bank.size(), cfg, &std::cout);

  const std::string model_path = join_path(out, "model.rpf");
  const std::string loss_path = join_path(out, "loss_history.csv");
  save_model(model_path, result.model);
  write_loss_history_csv(loss_path, result.history);
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "train"},
                  {"manifest", manifest},
                  {"snippets", std::to_string(bank.size())},
                  {"size", std::to_string(size.w) + "x" + std::to_string(size.h)},
                  {"channels", channels},
                  {"epochs", std::to_string(epochs)},
                  {"snippets_per_epoch", std::to_string(spe)},
                  {"batch_size", std::to_string(batch)},
                  {"learning_rate", std::to_string(lr)},
                  {"seed", std::to_string(seed)},
                  {"model", model_path},
                  {"loss_history", loss_path}});
  std::printf("model %s checksum %016llx\n", model_path.c_str(),
              static_cast<unsigned long long>(file_checksum(model_path)));
  return 0;
}

int cmd_predict(const std::string& input, const Size& size, int at, const std::string& model_path,
                const std::string& out) {
  ensure_out(out);
  const std::vector<Picture> frames = read_raw_video(input, size.w, size.h);
  if (at < 4 || at >= static_cast<int>(frames.size()))
    throw std::runtime_error("predict: frame index " + std::to_string(at) +
                             " needs 4 preceding pictures in a file of " +
                             std::to_string(frames.size()));
  const PredictorModel<float> model = load_model(model_path);
  const std::vector<const Picture*> refs{&frames[static_cast<std::size_t>(at - 4)],
                                         &frames[static_cast<std::size_t>(at - 3)],
                                         &frames[static_cast<std::size_t>(at - 2)],
                                         &frames[static_cast<std::size_t>(at - 1)]};
  const Picture artificial = predict_artificial(model, refs);
  const std::string pred_path = join_path(out, "artificial.yuv");
  write_raw_video(pred_path, {artificial});

  const Picture& truth = frames[static_cast<std::size_t>(at)];
  const Picture err = error_image(artificial, truth);
  const std::string err_path = join_path(out, "error.pgm");
  write_pgm(err_path, err.y.data(), err.width, err.height);
  std::printf("artificial vs t0: MSE %.2f  SSIM %.4f   (t-1 vs t0: MSE %.2f  SSIM %.4f)\n",
              picture_mse_luma(artificial, truth), picture_ssim_luma(artificial, truth),
              picture_mse_luma(*refs[3], truth), picture_ssim_luma(*refs[3], truth));
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "predict"},
                  {"input", input},
                  {"at", std::to_string(at)},
                  {"model", model_path},
                  {"artificial", pred_path},
                  {"error_image", err_path}});
  return 0;
}

int cmd_encode(const std::string& input, const Size& size, int qp, const std::string& mode_str,
               const std::string& model_path, bool oracle, int range, const std::string& out) {
  ensure_out(out);
  const std::vector<Picture> seq = read_raw_video(input, size.w, size.h);
  SequenceCodingConfig cfg;
  cfg.qp = qp;
  cfg.search_range = range;
  if (mode_str == "conventional")
    cfg.mode = CodingMode::Conventional;
  else if (mode_str == "replace-t4")
    cfg.mode = CodingMode::ReplaceT4;
  else
    throw CLI::ValidationError("--mode", "expected conventional or replace-t4");

  std::unique_ptr<ArtificialSource> source;
  if (cfg.mode == CodingMode::ReplaceT4) {
    const PredictorChoice choice = load_choice(model_path, oracle, true);
    if (choice.kind == PredictorChoice::Kind::Oracle)
      source = std::make_unique<OracleSource>(&seq);
    else
      source = std::make_unique<ModelSource>(choice.model);
  }
  const SequenceResult res = code_sequence(seq, cfg, source.get());

  const std::string stream_path = join_path(out, "stream.bin");
  const std::string recon_path = join_path(out, "recon.yuv");
  const std::string stats_path = join_path(out, "stats.csv");
  write_stream(stream_path, res.stream);
  write_raw_video(recon_path, res.recon);
  write_stats_csv(stats_path, res.stats);
  std::printf("qp %d  bits %.0f  psnr Y %.3f Cb %.3f Cr %.3f\n", res.rd.qp, res.rd.bits,
              res.rd.psnr_y, res.rd.psnr_cb, res.rd.psnr_cr);
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "encode"},
                  {"input", input},
                  {"size", std::to_string(size.w) + "x" + std::to_string(size.h)},
                  {"qp", std::to_string(qp)},
                  {"mode", mode_str},
                  {"model", oracle ? "oracle" : model_path},
                  {"search_range", std::to_string(range)},
                  {"stream", stream_path},
                  {"recon", recon_path},
                  {"stats", stats_path}});
  return 0;
}

int cmd_decode(const std::string& stream_path, const std::string& model_path, bool oracle,
               const std::string& original, const std::string& out) {
  ensure_out(out);
  const EncodedSequence stream = read_stream(stream_path);
  std::unique_ptr<ArtificialSource> source;
  std::vector<Picture> originals;
  if (stream.header.mode == CodingMode::ReplaceT4) {
    const PredictorChoice choice = load_choice(model_path, oracle, true);
    if (choice.kind == PredictorChoice::Kind::Oracle) {
      if (original.empty())
        throw CLI::ValidationError("--original",
                                   "oracle decode needs the original sequence (experiment only)");
      originals = read_raw_video(original, stream.header.width, stream.header.height);
      source = std::make_unique<OracleSource>(&originals);
    } else {
      source = std::make_unique<ModelSource>(choice.model);
    }
  }
  const std::vector<Picture> decoded = decode_sequence(stream, source.get());
  const std::string out_path = join_path(out, "decoded.yuv");
  write_raw_video(out_path, decoded);
  std::printf("decoded %zu pictures (%dx%d, qp %d, %s) to %s\n", decoded.size(),
              stream.header.width, stream.header.height, stream.header.qp,
              to_string(stream.header.mode), out_path.c_str());
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "decode"},
                  {"stream", stream_path},
                  {"model", oracle ? "oracle" : model_path},
                  {"decoded", out_path}});
  return 0;
}

int cmd_eval(const std::string& a_path, const std::string& b_path, const Size& size,
             bool all_planes, bool error_images, const std::string& out) {
  ensure_out(out);
  const std::vector<Picture> a = read_raw_video(a_path, size.w, size.h);
  const std::vector<Picture> b = read_raw_video(b_path, size.w, size.h);
  if (a.size() != b.size())
    throw std::runtime_error("eval: sequence lengths differ: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
  std::ostringstream csv;
  csv << "frame,mse,psnr,ssim\n";
  double mse_acc = 0, ssim_acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mse =
        all_planes ? picture_mse_all_planes(a[i], b[i]) : picture_mse_luma(a[i], b[i]);
    const double ssim = picture_ssim_luma(a[i], b[i]);
    mse_acc += mse;
    ssim_acc += ssim;
    char line[96];
    std::snprintf(line, sizeof line, "%zu,%.4f,%.4f,%.6f\n", i, mse, psnr_from_mse(mse), ssim);
    csv << line;
    if (error_images) {
      char name[48];
      std::snprintf(name, sizeof name, "error_%03zu.pgm", i);
      const Picture err = error_image(a[i], b[i]);
      write_pgm(join_path(out, name), err.y.data(), err.width, err.height);
    }
  }
  const std::string csv_path = join_path(out, "metrics.csv");
  write_text_file(csv_path, csv.str());
  std::printf("frames %zu  mean MSE %.2f  mean SSIM %.4f\n", a.size(),
              mse_acc / static_cast<double>(a.size()), ssim_acc / static_cast<double>(a.size()));
  write_manifest(join_path(out, "manifest.txt"), {{"command", "eval"},
                                                  {"a", a_path},
                                                  {"b", b_path},
                                                  {"all_planes", all_planes ? "1" : "0"},
                                                  {"metrics", csv_path}});
  return 0;
}

int cmd_bdrate(const std::string& anchor_path, const std::string& test_path,
               const std::string& out) {
  const std::vector<RDPoint> anchor = read_rd_csv(anchor_path);
  const std::vector<RDPoint> test = read_rd_csv(test_path);
  const BdReport rep = bd_report(anchor, test);
  std::string text;
  if (!rep.valid) {
    text = "BD-rate: " + rep.note + "\n";
  } else {
    char line[160];
    std::snprintf(line, sizeof line,
                  "BD-rate   Y %8.2f%%   Cb %8.2f%%   Cr %8.2f%%   Weighted %8.2f%%\n",
                  rep.y.percent, rep.cb.percent, rep.cr.percent, rep.weighted);
    text = line;
  }
  std::fputs(text.c_str(), stdout);
  if (!out.empty()) {
    ensure_out(out);
    write_text_file(join_path(out, "bdrate.txt"), text);
    write_manifest(join_path(out, "manifest.txt"),
                   {{"command", "bdrate"}, {"anchor", anchor_path}, {"test", test_path}});
  }
  return 0;
}

int cmd_table1(const std::string& manifest, const Size& size, const std::string& model_path,
               bool oracle, bool all_planes, const std::string& out) {
  ensure_out(out);
  const std::vector<Snippet> snippets = load_snippets(read_lines(manifest), size.w, size.h);
  const PredictorChoice choice = load_choice(model_path, oracle, true);
  const std::vector<QualityRow> rows = reference_quality_table(snippets, choice, all_planes);
  const std::string text = format_quality_table(rows);
  std::fputs(text.c_str(), stdout);
  std::ostringstream csv;
  csv << "reference,mse,ssim\n";
  for (const QualityRow& r : rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%s,%.4f,%.6f\n", r.label.c_str(), r.mse, r.ssim);
    csv << line;
  }
  write_text_file(join_path(out, "table1.csv"), csv.str());
  write_text_file(join_path(out, "table1.txt"), text);
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "table1"},
                  {"manifest", manifest},
                  {"snippets", std::to_string(snippets.size())},
                  {"model", oracle ? "oracle" : model_path},
                  {"all_planes", all_planes ? "1" : "0"}});
  return 0;
}

int cmd_abtest(const std::string& list, const Size& size, const std::string& qps_str,
               const std::string& model_path, bool oracle, int range, int workers,
               const std::string& out) {
  AbTestConfig cfg;
  cfg.sequence_paths = read_lines(list);
  cfg.width = size.w;
  cfg.height = size.h;
  cfg.qps = parse_qps(qps_str);
  cfg.search_range = range;
  cfg.workers = workers;
  cfg.out_dir = out;
  const PredictorChoice choice = load_choice(model_path, oracle, true);
  const AbTestReport report = run_ab_test(cfg, choice);
  std::fputs(report.text.c_str(), stdout);
  write_manifest(join_path(out, "manifest.txt"),
                 {{"command", "ab-test"},
                  {"list", list},
                  {"sequences", std::to_string(cfg.sequence_paths.size())},
                  {"size", std::to_string(size.w) + "x" + std::to_string(size.h)},
                  {"qps", qps_str},
                  {"model", oracle ? "oracle" : model_path},
                  {"search_range", std::to_string(range)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"artificial-reference-picture video coding toolkit"};
  app.require_subcommand(1);

  std::string out = "arpvc_out";
  std::string size_str = "64x64";
  std::string model_path;
  bool oracle = false;
  std::uint64_t seed = 1;

  // synth
  auto* synth = app.add_subcommand("synth", "generate the synthetic corpus or one spec'd sequence");
  int train_count = 200, holdout_count = 50, frames = 9;
  double max_speed = 2.6;
  std::string spec_path;
  synth->add_option("--out", out, "output directory");
  synth->add_option("--train", train_count, "training sequence count");
  synth->add_option("--holdout", holdout_count, "held-out sequence count");
  synth->add_option("--size", size_str, "canvas WxH");
  synth->add_option("--frames", frames, "frames per sequence");
  synth->add_option("--seed", seed, "corpus seed");
  synth->add_option("--max-speed", max_speed, "object speed bound, pel/frame");
  synth->add_option("--spec", spec_path, "render a single sequence from a key-value spec file");

  // snippets
  auto* snippets = app.add_subcommand("snippets", "cut sequences into 5-picture snippets");
  std::string list_path, input_path;
  int stride = 5;
  snippets->add_option("--list", list_path, "text file listing sequence paths");
  snippets->add_option("--input", input_path, "single raw video");
  snippets->add_option("--size", size_str, "WxH of the raw videos");
  snippets->add_option("--stride", stride, "snippet stride in frames");
  snippets->add_option("--out", out, "output directory");

  // train
  auto* train = app.add_subcommand("train", "train the recurrent predictor");
  std::string manifest_path, channels = "3,48,96,192";
  int epochs = 150, spe = 1000, batch = 4, workers = 0;
  double lr = 1e-3;
  train->add_option("--manifest", manifest_path, "snippet manifest")->required();
  train->add_option("--size", size_str, "snippet WxH");
  train->add_option("--channels", channels, "module channel plan");
  train->add_option("--epochs", epochs, "training epochs");
  train->add_option("--snippets-per-epoch", spe, "random snippets per epoch");
  train->add_option("--batch", batch, "snippets per optimizer step");
  train->add_option("--lr", lr, "Adam learning rate");
  train->add_option("--seed", seed, "training seed");
  train->add_option("--workers", workers, "worker threads (0 = auto)");
  train->add_option("--out", out, "output directory");

  // predict
  auto* predict = app.add_subcommand("predict", "synthesize one artificial reference picture");
  int at = 4;
  predict->add_option("--input", input_path, "raw video")->required();
  predict->add_option("--size", size_str, "WxH");
  predict->add_option("--at", at, "index of the picture to predict (needs 4 predecessors)");
  predict->add_option("--model", model_path, "trained model")->required();
  predict->add_option("--out", out, "output directory");

  // encode / decode
  auto* encode = app.add_subcommand("encode", "encode a sequence");
  int qp = 32, range = 16;
  std::string mode = "conventional";
  encode->add_option("--input", input_path, "raw video")->required();
  encode->add_option("--size", size_str, "WxH");
  encode->add_option("--qp", qp, "quantization parameter, 0..51");
  encode->add_option("--mode", mode, "conventional | replace-t4");
  encode->add_option("--model", model_path, "trained model for replace-t4");
  encode->add_flag("--oracle", oracle, "use the true picture as the artificial reference");
  encode->add_option("--range", range, "motion search range");
  encode->add_option("--out", out, "output directory");

  auto* decode = app.add_subcommand("decode", "decode a stream");
  std::string stream_path, original_path;
  decode->add_option("--stream", stream_path, "coded stream")->required();
  decode->add_option("--model", model_path, "trained model for replace-t4 streams");
  decode->add_flag("--oracle", oracle, "oracle experiment decode (needs --original)");
  decode->add_option("--original", original_path, "original sequence for --oracle");
  decode->add_option("--out", out, "output directory");

  // eval
  auto* eval = app.add_subcommand("eval", "fidelity metrics between two raw videos");
  std::string b_path;
  bool all_planes = false, error_images = false;
  eval->add_option("--a", input_path, "first raw video")->required();
  eval->add_option("--b", b_path, "second raw video")->required();
  eval->add_option("--size", size_str, "WxH");
  eval->add_flag("--all-planes", all_planes, "MSE over all three planes");
  eval->add_flag("--error-images", error_images, "write per-frame error PGMs");
  eval->add_option("--out", out, "output directory");

  // bdrate
  auto* bdrate = app.add_subcommand("bdrate", "Bjontegaard delta rate between two RD CSVs");
  std::string anchor_path, test_path;
  bdrate->add_option("--anchor", anchor_path, "anchor RD csv")->required();
  bdrate->add_option("--test", test_path, "test RD csv")->required();
  bdrate->add_option("--out", out, "optional output directory");

  // table1
  auto* table1 = app.add_subcommand("table1", "reference-quality table over a snippet set");
  table1->add_option("--manifest", manifest_path, "snippet manifest")->required();
  table1->add_option("--size", size_str, "WxH");
  table1->add_option("--model", model_path, "trained model");
  table1->add_flag("--oracle", oracle, "oracle predictor (upper bound)");
  table1->add_flag("--all-planes", all_planes, "MSE over all three planes");
  table1->add_option("--out", out, "output directory");

  // ab-test
  auto* abtest = app.add_subcommand("ab-test", "full conventional vs replace-t4 experiment");
  std::string qps = "22,27,32,37";
  abtest->add_option("--list", list_path, "text file listing sequence paths")->required();
  abtest->add_option("--size", size_str, "WxH");
  abtest->add_option("--qps", qps, "comma-separated QP set");
  abtest->add_option("--model", model_path, "trained model");
  abtest->add_flag("--oracle", oracle, "oracle predictor (upper bound)");
  abtest->add_option("--range", range, "motion search range");
  abtest->add_option("--workers", workers, "worker threads (0 = auto)");
  abtest->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const Size size = parse_size(size_str);
    if (synth->parsed())
      return cmd_synth(out, train_count, holdout_count, size, frames, seed, max_speed, spec_path);
    if (snippets->parsed()) return cmd_snippets(list_path, input_path, size, stride, out);
    if (train->parsed())
      return cmd_train(manifest_path, size, channels, epochs, spe, batch, lr, seed, workers, out);
    if (predict->parsed()) return cmd_predict(input_path, size, at, model_path, out);
    if (encode->parsed())
      return cmd_encode(input_path, size, qp, mode, model_path, oracle, range, out);
    if (decode->parsed()) return cmd_decode(stream_path, model_path, oracle, original_path, out);
    if (eval->parsed()) return cmd_eval(input_path, b_path, size, all_planes, error_images, out);
    if (bdrate->parsed()) return cmd_bdrate(anchor_path, test_path, out);
    if (table1->parsed())
      return cmd_table1(manifest_path, size, model_path, oracle, all_planes, out);
    if (abtest->parsed()) return cmd_abtest(list_path, size, qps, model_path, oracle, range,
                                            workers, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
