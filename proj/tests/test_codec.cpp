// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "arpvc/codec.hpp"
#include "arpvc/synth.hpp"
#include "arpvc/util.hpp"

using namespace arpvc;

namespace {

std::vector<Picture> moving_sequence(int w, int h, int frames, std::uint64_t seed,
                                     bool fractional = true) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  RandomSpecOptions opt;
  opt.fractional = fractional;
  opt.min_objects = 1;
  opt.max_objects = 2;
  const SyntheticSpec spec = random_spec(w, h, frames, rng, opt);
  return synthesize(spec, seed);
}

bool records_equal(const BlockRecord& a, const BlockRecord& b) {
  return a.mode == b.mode && a.ref == b.ref && a.mvx == b.mvx && a.mvy == b.mvy &&
         a.coeffs == b.coeffs;
}

}  // namespace

TEST_CASE("closed loop: decode equals the encoder reconstruction bit-exactly") {
  std::mt19937 rng(51);
  for (int trial = 0; trial < 4; ++trial) {
    const std::vector<Picture> seq = moving_sequence(32, 32, 6, 100 + trial);
    SequenceCodingConfig cfg;
    cfg.qp = 20 + 6 * trial;
    cfg.search_range = 8;
    if (trial % 2 == 0) {
      cfg.mode = CodingMode::Conventional;
      const SequenceResult res = code_sequence(seq, cfg);
      const std::vector<Picture> dec = decode_sequence(res.stream);
      REQUIRE(dec.size() == seq.size());
      for (std::size_t i = 0; i < dec.size(); ++i) CHECK(dec[i] == res.recon[i]);
    } else {
      cfg.mode = CodingMode::ReplaceT4;
      ModelSource source(PredictorModel<float>::random({3, 4, 8, 16}, 5));
      const SequenceResult res = code_sequence(seq, cfg, &source);
      const std::vector<Picture> dec = decode_sequence(res.stream, &source);
      for (std::size_t i = 0; i < dec.size(); ++i) CHECK(dec[i] == res.recon[i]);
    }
  }
}

TEST_CASE("a picture identical to a reference codes as all skip") {
  const std::vector<Picture> base = moving_sequence(32, 32, 1, 7);
  std::vector<Picture> seq{base[0], base[0]};
  SequenceCodingConfig cfg;
  cfg.qp = 32;
  const SequenceResult res = code_sequence(seq, cfg);
  // picture 1 is intra; picture 2 must skip everywhere: the co-located
  // reference block (the reconstruction of picture 1) is the best possible
  const EncodedPicture& p2 = res.stream.pictures[1];
  for (const BlockRecord& b : p2.blocks) CHECK(b.mode == BlockMode::Skip);
  CHECK(p2.bits == p2.blocks.size() * 4);  // mode flag + reference index
  CHECK(res.recon[1] == res.recon[0]);
}

TEST_CASE("rate decreases as QP grows") {
  const std::vector<Picture> seq = moving_sequence(48, 32, 6, 9);
  double first_bits = 0, prev_bits = 0;
  bool first = true;
  for (int qp : {22, 27, 32, 37}) {
    SequenceCodingConfig cfg;
    cfg.qp = qp;
    const SequenceResult res = code_sequence(seq, cfg);
    if (first)
      first_bits = res.rd.bits;
    else
      CHECK(res.rd.bits <= prev_bits);
    prev_bits = res.rd.bits;
    first = false;
  }
  CHECK(prev_bits < first_bits);  // strictly fewer bits at QP 37 than at QP 22
}

TEST_CASE("pure integer translation within range codes above 45 dB at QP 22") {
  // Fully representable motion: a flat backdrop matches under any
  // displacement, so every block (object interior and edge alike) has an
  // exact integer-pel prediction.
  SyntheticSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.frames = 9;
  spec.background_flat = 110;
  SyntheticObject o;
  o.kind = SyntheticObject::Kind::Rect;
  o.x = 6;
  o.y = 20;
  o.w = 18;
  o.h = 16;
  o.vx = 3;
  o.vy = 1;
  o.texture_seed = 4;
  spec.objects.push_back(o);
  const std::vector<Picture> seq = synthesize(spec, 12);
  SequenceCodingConfig cfg;
  cfg.qp = 22;
  const SequenceResult res = code_sequence(seq, cfg);
  CHECK(res.rd.psnr_y >= 45.0);
}

TEST_CASE("predict_artificial requires exactly 4 references") {
  PredictorModel<float> model = PredictorModel<float>::random({3, 4, 8, 16}, 5);
  const std::vector<Picture> seq = moving_sequence(32, 32, 3, 55);
  const std::vector<const Picture*> three{&seq[0], &seq[1], &seq[2]};
  CHECK_THROWS_AS(predict_artificial(model, three), std::invalid_argument);
}

TEST_CASE("streams are identical across modes for the first four pictures") {
  const std::vector<Picture> seq = moving_sequence(32, 32, 7, 11);
  SequenceCodingConfig conv;
  conv.qp = 27;
  SequenceCodingConfig repl = conv;
  repl.mode = CodingMode::ReplaceT4;
  ModelSource source(PredictorModel<float>::random({3, 4, 8, 16}, 6));
  const SequenceResult a = code_sequence(seq, conv);
  const SequenceResult b = code_sequence(seq, repl, &source);
  for (int poc = 0; poc < 4; ++poc) {
    const auto& pa = a.stream.pictures[static_cast<std::size_t>(poc)];
    const auto& pb = b.stream.pictures[static_cast<std::size_t>(poc)];
    REQUIRE(pa.blocks.size() == pb.blocks.size());
    for (std::size_t i = 0; i < pa.blocks.size(); ++i)
      CHECK(records_equal(pa.blocks[i], pb.blocks[i]));
  }
  // replacement starts at picture 5
  CHECK(b.stats[4].kind == "replace-t4");
  CHECK(a.stats[4].kind == "inter");
}

TEST_CASE("an oracle reference never costs rate at equal QP") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const std::vector<Picture> seq = moving_sequence(48, 48, 8, seed);
    SequenceCodingConfig conv;
    conv.qp = 27;
    const SequenceResult a = code_sequence(seq, conv);
    SequenceCodingConfig repl = conv;
    repl.mode = CodingMode::ReplaceT4;
    OracleSource oracle(&seq);
    const SequenceResult b = code_sequence(seq, repl, &oracle);
    CHECK(b.rd.bits <= a.rd.bits);
  }
}

TEST_CASE("replace-t4 without a model is a configuration error") {
  const std::vector<Picture> seq = moving_sequence(32, 32, 5, 31);
  SequenceCodingConfig cfg;
  cfg.mode = CodingMode::ReplaceT4;
  CHECK_THROWS_WITH_AS(code_sequence(seq, cfg), doctest::Contains("configuration"),
                       std::invalid_argument);
}

TEST_CASE("conventional output is independent of any loaded model") {
  const std::vector<Picture> seq = moving_sequence(32, 32, 6, 33);
  SequenceCodingConfig cfg;
  cfg.qp = 30;
  ModelSource source(PredictorModel<float>::random({3, 4, 8, 16}, 5));
  const SequenceResult with_model = code_sequence(seq, cfg, &source);
  const SequenceResult without = code_sequence(seq, cfg);
  CHECK(with_model.rd.bits == without.rd.bits);
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(with_model.recon[i] == without.recon[i]);
}

TEST_CASE("corrupting a reference index fails decode at that block") {
  const std::vector<Picture> seq = moving_sequence(32, 32, 3, 41);
  SequenceCodingConfig cfg;
  cfg.qp = 27;
  SequenceResult res = code_sequence(seq, cfg);
  res.stream.pictures[1].blocks[2].mode = BlockMode::Inter;
  res.stream.pictures[1].blocks[2].ref = 3;  // only 1 reference exists at poc 1
  CHECK_THROWS_WITH_AS(decode_sequence(res.stream), doctest::Contains("block 2"),
                       std::runtime_error);
}

TEST_CASE("qp range and picture extents are validated") {
  const std::vector<Picture> seq = moving_sequence(32, 32, 2, 43);
  SequenceCodingConfig cfg;
  cfg.qp = 52;
  CHECK_THROWS_AS(code_sequence(seq, cfg), std::invalid_argument);
  Picture odd(24, 24);  // not a multiple of 16
  SequenceCodingConfig ok;
  ok.qp = 30;
  CHECK_THROWS_AS(code_sequence({odd}, ok), std::invalid_argument);
}

TEST_CASE("stream file round-trips") {
  const std::vector<Picture> seq = moving_sequence(32, 32, 5, 45);
  SequenceCodingConfig cfg;
  cfg.qp = 24;
  const SequenceResult res = code_sequence(seq, cfg);
  const std::string path =
      (std::filesystem::temp_directory_path() / "arpvc_stream.bin").string();
  write_stream(path, res.stream);
  const EncodedSequence back = read_stream(path);
  CHECK(back.header.width == 32);
  CHECK(back.header.qp == 24);
  REQUIRE(back.pictures.size() == res.stream.pictures.size());
  for (std::size_t p = 0; p < back.pictures.size(); ++p) {
    CHECK(back.pictures[p].bits == res.stream.pictures[p].bits);
    REQUIRE(back.pictures[p].blocks.size() == res.stream.pictures[p].blocks.size());
    for (std::size_t i = 0; i < back.pictures[p].blocks.size(); ++i)
      CHECK(records_equal(back.pictures[p].blocks[i], res.stream.pictures[p].blocks[i]));
  }
  const std::vector<Picture> dec = decode_sequence(back);
  for (std::size_t i = 0; i < dec.size(); ++i) CHECK(dec[i] == res.recon[i]);
  std::remove(path.c_str());
}
