// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "arpvc/picture.hpp"
#include "arpvc/predictor.hpp"

namespace arpvc {

// ---------------------------------------------------------------------------
// Simplified closed-loop hybrid codec: 16x16 blocks, full-search integer-pel
// motion compensation over a 4-picture low-delay reference buffer, 8x8 DCT
// residual coding, exp-Golomb rate proxy, RD mode decision with
// lambda = 0.85 * 2^((QP-12)/3). In replace-t4 mode the oldest reference is
// substituted by a network-generated picture at the current time instance,
// identically at encoder and decoder.
// ---------------------------------------------------------------------------

enum class CodingMode : std::uint8_t { Conventional = 0, ReplaceT4 = 1 };
enum class BlockMode : std::uint8_t { Skip = 0, Inter = 1, IntraDc = 2 };

inline const char* to_string(CodingMode m) {
  return m == CodingMode::Conventional ? "conventional" : "replace-t4";
}

constexpr int kBlockSize = 16;
constexpr int kCoeffBlocks = 6;  // 4 luma 8x8 + Cb + Cr

struct BlockRecord {
  BlockMode mode = BlockMode::IntraDc;
  std::uint8_t ref = 0;
  std::int16_t mvx = 0, mvy = 0;
  std::array<std::array<std::int16_t, 64>, kCoeffBlocks> coeffs{};
};

struct EncodedPicture {
  std::vector<BlockRecord> blocks;
  std::uint64_t bits = 0;
};

struct SequenceHeader {
  int width = 0, height = 0;
  int qp = 0;
  CodingMode mode = CodingMode::Conventional;
  std::uint32_t picture_count = 0;
};

struct EncodedSequence {
  SequenceHeader header;
  std::vector<EncodedPicture> pictures;
};

/// Ordered reconstructed-picture buffer; entry(0) is t-1, entry(3) is t-4.
class ReferenceList {
 public:
  void push(Picture recon);
  int size() const { return static_cast<int>(entries_.size()); }
  const Picture& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }
  std::vector<const Picture*> pointers() const;           // newest first
  std::vector<const Picture*> pointers_oldest_first() const;
  /// Copy with slot t-4 holding the artificial picture. Requires 4 entries.
  ReferenceList replaced_oldest(Picture artificial) const;

 private:
  std::deque<Picture> entries_;
};

/// Source of the substitute picture at the current time instance.
struct ArtificialSource {
  virtual ~ArtificialSource() = default;
  /// refs are the conventional reconstructions, oldest (t-4) first.
  virtual Picture generate(const std::vector<const Picture*>& refs_oldest_first, int poc) = 0;
  virtual std::string describe() const = 0;
};

class ModelSource final : public ArtificialSource {
 public:
  explicit ModelSource(PredictorModel<float> model) : model_(std::move(model)) {}
  Picture generate(const std::vector<const Picture*>& refs, int poc) override;
  std::string describe() const override { return "model"; }
  const PredictorModel<float>& model() const { return model_; }

 private:
  PredictorModel<float> model_;
};

/// Returns the true original picture: the upper bound used by A/B tests.
class OracleSource final : public ArtificialSource {
 public:
  explicit OracleSource(const std::vector<Picture>* originals) : originals_(originals) {}
  Picture generate(const std::vector<const Picture*>&, int poc) override;
  std::string describe() const override { return "oracle"; }

 private:
  const std::vector<Picture>* originals_;
};

/// Generates the artificial picture from 4 reference pictures (oldest first)
/// via the recurrent predictor; output is denormalized and clamped.
Picture predict_artificial(const PredictorModel<float>& model,
                           const std::vector<const Picture*>& refs_oldest_first);

struct PictureEncodeResult {
  EncodedPicture enc;
  Picture recon;
};

PictureEncodeResult encode_picture(const Picture& orig, const ReferenceList& refs, int qp,
                                   int search_range = 16);
/// Bit-identical to the encoder-side reconstruction for a stream produced
/// against identical references. Throws on malformed records, naming the
/// block index.
Picture decode_picture(const EncodedPicture& enc, const ReferenceList& refs, int qp, int width,
                       int height);

struct PictureStats {
  int poc = 0;
  std::string kind;  // intra | inter | replace-t4
  std::uint64_t bits = 0;
  double psnr_y = 0, psnr_cb = 0, psnr_cr = 0;
};

struct RDPoint {
  int qp = 0;
  double bits = 0;
  double psnr_y = 0, psnr_cb = 0, psnr_cr = 0;
  double psnr(int plane) const { return plane == 0 ? psnr_y : plane == 1 ? psnr_cb : psnr_cr; }
};

struct SequenceResult {
  EncodedSequence stream;
  std::vector<Picture> recon;
  std::vector<PictureStats> stats;
  RDPoint rd;
};

struct SequenceCodingConfig {
  int qp = 32;
  CodingMode mode = CodingMode::Conventional;
  int search_range = 16;
};

/// Low-delay coding: picture 1 intra-only, pictures 2..4 on the growing
/// conventional list, and from picture 5 on the replace-t4 substitution when
/// enabled. `source` is required in replace-t4 mode.
SequenceResult code_sequence(const std::vector<Picture>& sequence, const SequenceCodingConfig& cfg,
                             ArtificialSource* source = nullptr);

/// Decoder-side mirror of code_sequence over a parsed stream.
std::vector<Picture> decode_sequence(const EncodedSequence& stream,
                                     ArtificialSource* source = nullptr);

void write_stream(const std::string& path, const EncodedSequence& stream);
EncodedSequence read_stream(const std::string& path);

void write_stats_csv(const std::string& path, const std::vector<PictureStats>& stats);
void write_rd_csv(const std::string& path, const std::vector<RDPoint>& points);
std::vector<RDPoint> read_rd_csv(const std::string& path);

double rd_lambda(int qp);

}  // namespace arpvc
