// SPDX-License-Identifier: Apache-2.0
#include "arpvc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "arpvc/dct.hpp"
#include "arpvc/kernels.hpp"
#include "arpvc/metrics.hpp"
#include "arpvc/motion.hpp"

namespace arpvc {

double rd_lambda(int qp) { return 0.85 * std::pow(2.0, (qp - 12) / 3.0); }

// --------------------------------------------------------------------------
// ReferenceList
// --------------------------------------------------------------------------

void ReferenceList::push(Picture recon) {
  entries_.push_front(std::move(recon));
  while (entries_.size() > 4) entries_.pop_back();
}

std::vector<const Picture*> ReferenceList::pointers() const {
  std::vector<const Picture*> out;
  out.reserve(entries_.size());
  for (const Picture& p : entries_) out.push_back(&p);
  return out;
}

std::vector<const Picture*> ReferenceList::pointers_oldest_first() const {
  std::vector<const Picture*> out = pointers();
  std::reverse(out.begin(), out.end());
  return out;
}

ReferenceList ReferenceList::replaced_oldest(Picture artificial) const {
  if (size() != 4)
    throw std::invalid_argument("reference list: replacement needs 4 entries, have " +
                                std::to_string(size()));
  ReferenceList out = *this;
  out.entries_[3] = std::move(artificial);
  return out;
}

// --------------------------------------------------------------------------
// Artificial picture sources
// --------------------------------------------------------------------------

Picture predict_artificial(const PredictorModel<float>& model,
                           const std::vector<const Picture*>& refs_oldest_first) {
  if (refs_oldest_first.size() != 4)
    throw std::invalid_argument("predict_artificial: need 4 reference pictures, got " +
                                std::to_string(refs_oldest_first.size()));
  for (const Picture* p : refs_oldest_first)
    if (!p->same_dims(*refs_oldest_first[0]))
      throw std::invalid_argument("predict_artificial: reference dimensions differ");
  std::vector<Tensor<float>> frames;
  frames.reserve(4);
  for (const Picture* p : refs_oldest_first) frames.push_back(picture_to_tensor(*p));
  return tensor_to_picture(predict_from_refs(model, frames));
}

Picture ModelSource::generate(const std::vector<const Picture*>& refs, int) {
  return predict_artificial(model_, refs);
}

Picture OracleSource::generate(const std::vector<const Picture*>&, int poc) {
  if (!originals_ || poc < 0 || poc >= static_cast<int>(originals_->size()))
    throw std::invalid_argument("oracle source: no original picture for poc " +
                                std::to_string(poc));
  return (*originals_)[static_cast<std::size_t>(poc)];
}

// --------------------------------------------------------------------------
// Block coding
// --------------------------------------------------------------------------

namespace {

inline std::uint8_t clamp_sample(int v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

std::uint64_t block_rate(const BlockRecord& rec) {
  switch (rec.mode) {
    case BlockMode::Skip:
      return 4;  // 2-bit mode flag + 2-bit reference index
    case BlockMode::Inter: {
      std::uint64_t bits = 4 + eg_signed_len(rec.mvx) + eg_signed_len(rec.mvy);
      for (const auto& blk : rec.coeffs)
        for (std::int16_t c : blk) bits += eg_signed_len(c);
      return bits;
    }
    case BlockMode::IntraDc: {
      std::uint64_t bits = 2;
      for (const auto& blk : rec.coeffs)
        for (std::int16_t c : blk) bits += eg_signed_len(c);
      return bits;
    }
  }
  return 0;
}

struct PlaneDesc {
  const std::uint8_t* data;
  int w, h;
};

PlaneDesc plane_of(const Picture& pic, int plane) {
  switch (plane) {
    case 0: return {pic.y.data(), pic.width, pic.height};
    case 1: return {pic.cb.data(), pic.chroma_width(), pic.chroma_height()};
    default: return {pic.cr.data(), pic.chroma_width(), pic.chroma_height()};
  }
}

std::uint8_t* plane_of(Picture& pic, int plane) {
  return plane == 0 ? pic.y.data() : plane == 1 ? pic.cb.data() : pic.cr.data();
}

/// Mean of the available left/top reconstructed border, 128 when none.
int dc_predict(const Picture& recon, int plane, int x0, int y0, int size) {
  PlaneDesc d = plane_of(recon, plane);
  std::uint32_t sum = 0;
  int count = 0;
  if (x0 > 0) {
    for (int y = 0; y < size; ++y) sum += d.data[static_cast<std::size_t>(y0 + y) * d.w + x0 - 1];
    count += size;
  }
  if (y0 > 0) {
    const std::uint8_t* top = d.data + static_cast<std::size_t>(y0 - 1) * d.w + x0;
    for (int x = 0; x < size; ++x) sum += top[x];
    count += size;
  }
  if (count == 0) return 128;
  return static_cast<int>((sum + count / 2) / static_cast<std::uint32_t>(count));
}

/// Fills the coefficient tiles of one plane region (raster 8x8 tiles) given
/// the prediction, quantizing orig - pred.
void quantize_region(const std::uint8_t* orig, int ostride, const std::uint8_t* pred, int pstride,
                     int x0, int y0, int size, int qp, std::array<std::int16_t, 64>* tiles) {
  int tile = 0;
  for (int ty = 0; ty < size; ty += 8) {
    for (int tx = 0; tx < size; tx += 8, ++tile) {
      std::int16_t residual[64];
      for (int y = 0; y < 8; ++y) {
        const std::uint8_t* po = orig + static_cast<std::size_t>(y0 + ty + y) * ostride + x0 + tx;
        const std::uint8_t* pp = pred + static_cast<std::size_t>(ty + y) * pstride + tx;
        for (int x = 0; x < 8; ++x) residual[y * 8 + x] = static_cast<std::int16_t>(po[x] - pp[x]);
      }
      transform_quantize(residual, qp, tiles[tile].data());
    }
  }
}

/// pred + dequantized residual -> recon plane region.
void reconstruct_region(const std::uint8_t* pred, int pstride, std::uint8_t* recon, int rstride,
                        int x0, int y0, int size, int qp,
                        const std::array<std::int16_t, 64>* tiles) {
  int tile = 0;
  for (int ty = 0; ty < size; ty += 8) {
    for (int tx = 0; tx < size; tx += 8, ++tile) {
      std::int16_t res[64];
      reconstruct_residual(tiles[tile].data(), qp, res);
      for (int y = 0; y < 8; ++y) {
        const std::uint8_t* pp = pred + static_cast<std::size_t>(ty + y) * pstride + tx;
        std::uint8_t* pr = recon + static_cast<std::size_t>(y0 + ty + y) * rstride + x0 + tx;
        for (int x = 0; x < 8; ++x) pr[x] = clamp_sample(pp[x] + res[y * 8 + x]);
      }
    }
  }
}

void copy_region(const std::uint8_t* src, int sstride, std::uint8_t* dst, int dstride, int w, int h) {
  for (int y = 0; y < h; ++y)
    std::memcpy(dst + static_cast<std::size_t>(y) * dstride, src + static_cast<std::size_t>(y) * sstride,
                static_cast<std::size_t>(w));
}

[[noreturn]] void decode_fail(int block_index, const std::string& why) {
  throw std::runtime_error("decode error at block " + std::to_string(block_index) + ": " + why);
}

/// Builds the motion-compensated prediction of one plane into a dense buffer.
void mc_predict(const Picture& ref, int plane, int x0, int y0, int size, int mvx, int mvy,
                std::uint8_t* out) {
  PlaneDesc d = plane_of(ref, plane);
  const std::uint8_t* src = d.data + static_cast<std::size_t>(y0 + mvy) * d.w + x0 + mvx;
  copy_region(src, d.w, out, size, size, size);
}

/// The one reconstruction path shared by the encoder loop and the decoder:
/// applies a block record on top of the current reconstruction state.
void reconstruct_block(const BlockRecord& rec, const ReferenceList& refs, int qp, int bx, int by,
                       Picture& recon, bool validate, int block_index) {
  const int cw2 = kBlockSize / 2;
  switch (rec.mode) {
    case BlockMode::Skip:
    case BlockMode::Inter: {
      if (rec.ref >= refs.size()) decode_fail(block_index, "reference index " +
                                              std::to_string(int(rec.ref)) + " out of range");
      const Picture& ref = refs.entry(rec.ref);
      const int mvx = rec.mode == BlockMode::Skip ? 0 : rec.mvx;
      const int mvy = rec.mode == BlockMode::Skip ? 0 : rec.mvy;
      if (validate) {
        if (bx + mvx < 0 || bx + mvx + kBlockSize > recon.width || by + mvy < 0 ||
            by + mvy + kBlockSize > recon.height)
          decode_fail(block_index, "motion vector (" + std::to_string(mvx) + "," +
                                       std::to_string(mvy) + ") leaves the picture");
      }
      std::uint8_t pred[kBlockSize * kBlockSize];
      for (int plane = 0; plane < 3; ++plane) {
        const int size = plane == 0 ? kBlockSize : cw2;
        const int px = plane == 0 ? bx : bx / 2;
        const int py = plane == 0 ? by : by / 2;
        const int pmvx = plane == 0 ? mvx : (mvx >> 1);
        const int pmvy = plane == 0 ? mvy : (mvy >> 1);
        mc_predict(ref, plane, px, py, size, pmvx, pmvy, pred);
        PlaneDesc d = plane_of(static_cast<const Picture&>(recon), plane);
        std::uint8_t* dst = plane_of(recon, plane);
        if (rec.mode == BlockMode::Skip) {
          copy_region(pred, size, dst + static_cast<std::size_t>(py) * d.w + px, d.w, size, size);
        } else {
          const std::array<std::int16_t, 64>* tiles = plane == 0 ? rec.coeffs.data()
                                                                  : &rec.coeffs[3 + plane];
          reconstruct_region(pred, size, dst, d.w, px, py, size, qp, tiles);
        }
      }
      break;
    }
    case BlockMode::IntraDc: {
      std::uint8_t pred[kBlockSize * kBlockSize];
      for (int plane = 0; plane < 3; ++plane) {
        const int size = plane == 0 ? kBlockSize : cw2;
        const int px = plane == 0 ? bx : bx / 2;
        const int py = plane == 0 ? by : by / 2;
        const int dc = dc_predict(recon, plane, px, py, size);
        std::memset(pred, dc, static_cast<std::size_t>(size) * size);
        PlaneDesc d = plane_of(static_cast<const Picture&>(recon), plane);
        std::uint8_t* dst = plane_of(recon, plane);
        const std::array<std::int16_t, 64>* tiles = plane == 0 ? rec.coeffs.data()
                                                                : &rec.coeffs[3 + plane];
        reconstruct_region(pred, size, dst, d.w, px, py, size, qp, tiles);
      }
      break;
    }
    default:
      decode_fail(block_index, "bad mode byte " + std::to_string(int(rec.mode)));
  }
}

std::uint64_t block_sse(const Picture& a, const Picture& b, int bx, int by) {
  std::uint64_t d = kern::sse(a.y.data() + static_cast<std::size_t>(by) * a.width + bx, a.width,
                              b.y.data() + static_cast<std::size_t>(by) * b.width + bx, b.width,
                              kBlockSize, kBlockSize);
  const int cw = a.chroma_width(), half = kBlockSize / 2;
  const std::size_t coff = static_cast<std::size_t>(by / 2) * cw + bx / 2;
  d += kern::sse(a.cb.data() + coff, cw, b.cb.data() + coff, cw, half, half);
  d += kern::sse(a.cr.data() + coff, cw, b.cr.data() + coff, cw, half, half);
  return d;
}

struct BlockBackup {
  std::uint8_t y[kBlockSize * kBlockSize];
  std::uint8_t cb[kBlockSize * kBlockSize / 4];
  std::uint8_t cr[kBlockSize * kBlockSize / 4];
};

void save_block(const Picture& pic, int bx, int by, BlockBackup& bk) {
  copy_region(pic.y.data() + static_cast<std::size_t>(by) * pic.width + bx, pic.width, bk.y,
              kBlockSize, kBlockSize, kBlockSize);
  const int cw = pic.chroma_width(), half = kBlockSize / 2;
  const std::size_t coff = static_cast<std::size_t>(by / 2) * cw + bx / 2;
  copy_region(pic.cb.data() + coff, cw, bk.cb, half, half, half);
  copy_region(pic.cr.data() + coff, cw, bk.cr, half, half, half);
}

void restore_block(Picture& pic, int bx, int by, const BlockBackup& bk) {
  copy_region(bk.y, kBlockSize, pic.y.data() + static_cast<std::size_t>(by) * pic.width + bx,
              pic.width, kBlockSize, kBlockSize);
  const int cw = pic.chroma_width(), half = kBlockSize / 2;
  const std::size_t coff = static_cast<std::size_t>(by / 2) * cw + bx / 2;
  copy_region(bk.cb, half, pic.cb.data() + coff, cw, half, half);
  copy_region(bk.cr, half, pic.cr.data() + coff, cw, half, half);
}

void fill_mc_coeffs(BlockRecord& rec, const Picture& orig, const ReferenceList& refs, int qp,
                    int bx, int by) {
  const Picture& ref = refs.entry(rec.ref);
  std::uint8_t pred[kBlockSize * kBlockSize];
  for (int plane = 0; plane < 3; ++plane) {
    const int size = plane == 0 ? kBlockSize : kBlockSize / 2;
    const int px = plane == 0 ? bx : bx / 2;
    const int py = plane == 0 ? by : by / 2;
    const int mvx = plane == 0 ? rec.mvx : (rec.mvx >> 1);
    const int mvy = plane == 0 ? rec.mvy : (rec.mvy >> 1);
    mc_predict(ref, plane, px, py, size, mvx, mvy, pred);
    PlaneDesc d = plane_of(orig, plane);
    std::array<std::int16_t, 64>* tiles = plane == 0 ? rec.coeffs.data() : &rec.coeffs[3 + plane];
    quantize_region(d.data, d.w, pred, size, px, py, size, qp, tiles);
  }
}

void fill_intra_coeffs(BlockRecord& rec, const Picture& orig, const Picture& recon, int qp,
                       int bx, int by) {
  std::uint8_t pred[kBlockSize * kBlockSize];
  for (int plane = 0; plane < 3; ++plane) {
    const int size = plane == 0 ? kBlockSize : kBlockSize / 2;
    const int px = plane == 0 ? bx : bx / 2;
    const int py = plane == 0 ? by : by / 2;
    const int dc = dc_predict(recon, plane, px, py, size);
    std::memset(pred, dc, static_cast<std::size_t>(size) * size);
    PlaneDesc d = plane_of(orig, plane);
    std::array<std::int16_t, 64>* tiles = plane == 0 ? rec.coeffs.data() : &rec.coeffs[3 + plane];
    quantize_region(d.data, d.w, pred, size, px, py, size, qp, tiles);
  }
}

}  // namespace

PictureEncodeResult encode_picture(const Picture& orig, const ReferenceList& refs, int qp,
                                   int search_range) {
  if (qp < 0 || qp > 51)
    throw std::invalid_argument("encode: QP must be in [0, 51], got " + std::to_string(qp));
  if (orig.width % kBlockSize != 0 || orig.height % kBlockSize != 0)
    throw std::invalid_argument("encode: picture extents must be multiples of " +
                                std::to_string(kBlockSize) + ", got " + std::to_string(orig.width) +
                                "x" + std::to_string(orig.height));
  for (int i = 0; i < refs.size(); ++i)
    if (!refs.entry(i).same_dims(orig))
      throw std::invalid_argument("encode: reference " + std::to_string(i) +
                                  " dimensions do not match the picture");

  PictureEncodeResult out;
  out.recon = Picture(orig.width, orig.height);
  const double lambda = rd_lambda(qp);
  const std::vector<const Picture*> ref_ptrs = refs.pointers();
  int block_index = 0;
  for (int by = 0; by < orig.height; by += kBlockSize) {
    for (int bx = 0; bx < orig.width; bx += kBlockSize, ++block_index) {
      std::vector<BlockRecord> candidates;
      if (refs.size() > 0) {
        // Skip: co-located copy from the best reference.
        BlockRecord skip;
        skip.mode = BlockMode::Skip;
        std::uint64_t best_d = ~0ull;
        for (int r = 0; r < refs.size(); ++r) {
          const std::uint64_t d = block_sse(orig, refs.entry(r), bx, by);
          if (d < best_d) {
            best_d = d;
            skip.ref = static_cast<std::uint8_t>(r);
          }
        }
        candidates.push_back(skip);

        BlockRecord inter;
        inter.mode = BlockMode::Inter;
        const MotionResult mr =
            motion_search(orig.y.data() + static_cast<std::size_t>(by) * orig.width + bx,
                          orig.width, ref_ptrs, bx, by, kBlockSize, kBlockSize, search_range);
        inter.ref = static_cast<std::uint8_t>(mr.ref);
        inter.mvx = static_cast<std::int16_t>(mr.mvx);
        inter.mvy = static_cast<std::int16_t>(mr.mvy);
        fill_mc_coeffs(inter, orig, refs, qp, bx, by);
        candidates.push_back(inter);
      }
      {
        BlockRecord intra;
        intra.mode = BlockMode::IntraDc;
        fill_intra_coeffs(intra, orig, out.recon, qp, bx, by);
        candidates.push_back(intra);
      }

      BlockBackup backup;
      save_block(out.recon, bx, by, backup);
      double best_cost = 0;
      int best = -1;
      for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
        reconstruct_block(candidates[c], refs, qp, bx, by, out.recon, false, block_index);
        const double cost = static_cast<double>(block_sse(orig, out.recon, bx, by)) +
                            lambda * static_cast<double>(block_rate(candidates[c]));
        restore_block(out.recon, bx, by, backup);
        if (best < 0 || cost < best_cost) {
          best = c;
          best_cost = cost;
        }
      }
      reconstruct_block(candidates[best], refs, qp, bx, by, out.recon, false, block_index);
      out.enc.bits += block_rate(candidates[best]);
      out.enc.blocks.push_back(candidates[best]);
    }
  }
  return out;
}

Picture decode_picture(const EncodedPicture& enc, const ReferenceList& refs, int qp, int width,
                       int height) {
  const int expected = (width / kBlockSize) * (height / kBlockSize);
  if (static_cast<int>(enc.blocks.size()) != expected)
    throw std::runtime_error("decode error: stream has " + std::to_string(enc.blocks.size()) +
                             " blocks, picture needs " + std::to_string(expected));
  Picture recon(width, height);
  int block_index = 0;
  for (int by = 0; by < height; by += kBlockSize) {
    for (int bx = 0; bx < width; bx += kBlockSize, ++block_index) {
      reconstruct_block(enc.blocks[static_cast<std::size_t>(block_index)], refs, qp, bx, by, recon,
                        true, block_index);
    }
  }
  return recon;
}

// --------------------------------------------------------------------------
// Sequence coding
// --------------------------------------------------------------------------

SequenceResult code_sequence(const std::vector<Picture>& sequence, const SequenceCodingConfig& cfg,
                             ArtificialSource* source) {
  if (sequence.empty()) throw std::invalid_argument("encode: empty sequence");
  if (cfg.mode == CodingMode::ReplaceT4 && source == nullptr)
    throw std::invalid_argument("configuration error: replace-t4 mode requires a predictor model");
  SequenceResult result;
  result.stream.header = {sequence[0].width, sequence[0].height, cfg.qp, cfg.mode,
                          static_cast<std::uint32_t>(sequence.size())};
  ReferenceList refs;
  double mse_sum[3] = {0, 0, 0};
  for (int poc = 0; poc < static_cast<int>(sequence.size()); ++poc) {
    const Picture& orig = sequence[static_cast<std::size_t>(poc)];
    if (!orig.same_dims(sequence[0]))
      throw std::invalid_argument("encode: picture " + std::to_string(poc) +
                                  " dimensions differ from picture 0");
    ReferenceList coding_refs = refs;
    std::string kind = poc == 0 ? "intra" : "inter";
    if (cfg.mode == CodingMode::ReplaceT4 && refs.size() == 4) {
      Picture artificial = source->generate(refs.pointers_oldest_first(), poc);
      if (!artificial.same_dims(orig))
        throw std::runtime_error("replace-t4: artificial picture dimensions do not match");
      coding_refs = refs.replaced_oldest(std::move(artificial));
      kind = "replace-t4";
    }
    PictureEncodeResult per = encode_picture(orig, coding_refs, cfg.qp, cfg.search_range);

    PictureStats st;
    st.poc = poc;
    st.kind = kind;
    st.bits = per.enc.bits;
    const double my =
        plane_mse(orig.y.data(), per.recon.y.data(), orig.width, orig.height);
    const double mcb =
        plane_mse(orig.cb.data(), per.recon.cb.data(), orig.chroma_width(), orig.chroma_height());
    const double mcr =
        plane_mse(orig.cr.data(), per.recon.cr.data(), orig.chroma_width(), orig.chroma_height());
    st.psnr_y = psnr_from_mse(my);
    st.psnr_cb = psnr_from_mse(mcb);
    st.psnr_cr = psnr_from_mse(mcr);
    mse_sum[0] += my;
    mse_sum[1] += mcb;
    mse_sum[2] += mcr;
    result.rd.bits += static_cast<double>(per.enc.bits);
    result.stats.push_back(std::move(st));
    result.stream.pictures.push_back(std::move(per.enc));
    refs.push(per.recon);
    result.recon.push_back(std::move(per.recon));
  }
  result.rd.qp = cfg.qp;
  // Sequence PSNR from the pooled MSE: losslessly coded pictures then count
  // as zero error instead of saturating the aggregate at the 99 dB cap.
  const double n = static_cast<double>(sequence.size());
  result.rd.psnr_y = psnr_from_mse(mse_sum[0] / n);
  result.rd.psnr_cb = psnr_from_mse(mse_sum[1] / n);
  result.rd.psnr_cr = psnr_from_mse(mse_sum[2] / n);
  return result;
}

std::vector<Picture> decode_sequence(const EncodedSequence& stream, ArtificialSource* source) {
  const SequenceHeader& h = stream.header;
  if (h.mode == CodingMode::ReplaceT4 && source == nullptr)
    throw std::invalid_argument("configuration error: replace-t4 decode requires a predictor model");
  if (stream.pictures.size() != h.picture_count)
    throw std::runtime_error("decode error: header announces " + std::to_string(h.picture_count) +
                             " pictures, stream has " + std::to_string(stream.pictures.size()));
  std::vector<Picture> out;
  ReferenceList refs;
  for (int poc = 0; poc < static_cast<int>(stream.pictures.size()); ++poc) {
    ReferenceList coding_refs = refs;
    if (h.mode == CodingMode::ReplaceT4 && refs.size() == 4) {
      Picture artificial = source->generate(refs.pointers_oldest_first(), poc);
      coding_refs = refs.replaced_oldest(std::move(artificial));
    }
    Picture recon =
        decode_picture(stream.pictures[static_cast<std::size_t>(poc)], coding_refs, h.qp, h.width,
                       h.height);
    refs.push(recon);
    out.push_back(std::move(recon));
  }
  return out;
}

// --------------------------------------------------------------------------
// Stream and CSV serialization
// --------------------------------------------------------------------------

namespace {

constexpr char kStreamMagic[4] = {'A', 'R', 'S', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error(std::string("stream: truncated while reading ") + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_i16(std::ostream& os, std::int16_t v) {
  const std::uint16_t u = static_cast<std::uint16_t>(v);
  unsigned char b[2] = {static_cast<unsigned char>(u & 0xff),
                        static_cast<unsigned char>((u >> 8) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

std::int16_t get_i16(std::istream& is, const char* what) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char*>(b), 2))
    throw std::runtime_error(std::string("stream: truncated while reading ") + what);
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(b[0]) |
                                   (static_cast<std::uint16_t>(b[1]) << 8));
}

}  // namespace

void write_stream(const std::string& path, const EncodedSequence& stream) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("stream: cannot open for writing: " + path);
  os.write(kStreamMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(stream.header.width));
  put_u32(os, static_cast<std::uint32_t>(stream.header.height));
  os.put(static_cast<char>(stream.header.qp));
  os.put(static_cast<char>(stream.header.mode));
  put_u32(os, stream.header.picture_count);
  for (const EncodedPicture& pic : stream.pictures) {
    put_u32(os, static_cast<std::uint32_t>(pic.blocks.size()));
    for (const BlockRecord& b : pic.blocks) {
      os.put(static_cast<char>(b.mode));
      switch (b.mode) {
        case BlockMode::Skip:
          os.put(static_cast<char>(b.ref));
          break;
        case BlockMode::Inter:
          os.put(static_cast<char>(b.ref));
          put_i16(os, b.mvx);
          put_i16(os, b.mvy);
          for (const auto& blk : b.coeffs)
            for (std::int16_t c : blk) put_i16(os, c);
          break;
        case BlockMode::IntraDc:
          for (const auto& blk : b.coeffs)
            for (std::int16_t c : blk) put_i16(os, c);
          break;
      }
    }
  }
  if (!os) throw std::runtime_error("stream: write failed: " + path);
}

EncodedSequence read_stream(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("stream: cannot open: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kStreamMagic, 4) != 0)
    throw std::runtime_error("stream: bad magic in " + path);
  EncodedSequence seq;
  seq.header.width = static_cast<int>(get_u32(is, "width"));
  seq.header.height = static_cast<int>(get_u32(is, "height"));
  const int qp = is.get();
  const int mode = is.get();
  if (qp < 0 || qp > 51) throw std::runtime_error("stream: bad QP " + std::to_string(qp));
  if (mode != 0 && mode != 1) throw std::runtime_error("stream: bad mode byte " + std::to_string(mode));
  seq.header.qp = qp;
  seq.header.mode = static_cast<CodingMode>(mode);
  seq.header.picture_count = get_u32(is, "picture count");
  for (std::uint32_t p = 0; p < seq.header.picture_count; ++p) {
    EncodedPicture pic;
    const std::uint32_t blocks = get_u32(is, "block count");
    pic.blocks.reserve(blocks);
    for (std::uint32_t i = 0; i < blocks; ++i) {
      BlockRecord rec;
      const int mb = is.get();
      if (mb < 0 || mb > 2)
        throw std::runtime_error("decode error at block " + std::to_string(i) + ": bad mode byte " +
                                 std::to_string(mb));
      rec.mode = static_cast<BlockMode>(mb);
      switch (rec.mode) {
        case BlockMode::Skip:
          rec.ref = static_cast<std::uint8_t>(is.get());
          break;
        case BlockMode::Inter:
          rec.ref = static_cast<std::uint8_t>(is.get());
          rec.mvx = get_i16(is, "mvx");
          rec.mvy = get_i16(is, "mvy");
          for (auto& blk : rec.coeffs)
            for (auto& c : blk) c = get_i16(is, "coefficient");
          break;
        case BlockMode::IntraDc:
          for (auto& blk : rec.coeffs)
            for (auto& c : blk) c = get_i16(is, "coefficient");
          break;
      }
      if (!is) throw std::runtime_error("stream: truncated at block " + std::to_string(i));
      pic.bits += block_rate(rec);
      pic.blocks.push_back(rec);
    }
    seq.pictures.push_back(std::move(pic));
  }
  return seq;
}

void write_stats_csv(const std::string& path, const std::vector<PictureStats>& stats) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("stats: cannot open for writing: " + path);
  os << "poc,mode,bits,psnr_y,psnr_cb,psnr_cr\n";
  char line[160];
  for (const PictureStats& s : stats) {
    std::snprintf(line, sizeof line, "%d,%s,%llu,%.4f,%.4f,%.4f\n", s.poc, s.kind.c_str(),
                  static_cast<unsigned long long>(s.bits), s.psnr_y, s.psnr_cb, s.psnr_cr);
    os << line;
  }
}

void write_rd_csv(const std::string& path, const std::vector<RDPoint>& points) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("rd csv: cannot open for writing: " + path);
  os << "qp,bits,psnr_y,psnr_cb,psnr_cr\n";
  char line[160];
  for (const RDPoint& p : points) {
    std::snprintf(line, sizeof line, "%d,%.0f,%.6f,%.6f,%.6f\n", p.qp, p.bits, p.psnr_y, p.psnr_cb,
                  p.psnr_cr);
    os << line;
  }
}

std::vector<RDPoint> read_rd_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("rd csv: cannot open: " + path);
  std::vector<RDPoint> out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("qp,", 0) == 0) continue;  // header
    }
    RDPoint p;
    std::istringstream ls(line);
    std::string field;
    try {
      std::getline(ls, field, ',');
      p.qp = std::stoi(field);
      std::getline(ls, field, ',');
      p.bits = std::stod(field);
      std::getline(ls, field, ',');
      p.psnr_y = std::stod(field);
      std::getline(ls, field, ',');
      p.psnr_cb = std::stod(field);
      std::getline(ls, field, ',');
      p.psnr_cr = std::stod(field);
    } catch (const std::exception&) {
      throw std::runtime_error("rd csv: malformed line in " + path + ": " + line);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace arpvc
