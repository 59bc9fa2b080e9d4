// SPDX-License-Identifier: Apache-2.0
#include "arpvc/bdrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace arpvc {

namespace {

struct Sample {
  double psnr;
  double log_rate;
};

/// Least-squares cubic through the samples; exact interpolation for 4 points.
std::array<double, 4> fit_cubic(const std::vector<Sample>& s) {
  double m[4][5] = {};
  for (const Sample& p : s) {
    double powers[7];
    powers[0] = 1.0;
    for (int k = 1; k < 7; ++k) powers[k] = powers[k - 1] * p.psnr;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m[r][c] += powers[r + c];
      m[r][4] += powers[r] * p.log_rate;
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12) throw std::runtime_error("bd-rate: singular fit");
    if (pivot != col)
      for (int c = 0; c < 5; ++c) std::swap(m[pivot][c], m[col][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return {m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2], m[3][4] / m[3][3]};
}

double integrate_cubic(const std::array<double, 4>& a, double lo, double hi) {
  const auto anti = [&](double x) {
    return a[0] * x + a[1] * x * x / 2.0 + a[2] * x * x * x / 3.0 + a[3] * x * x * x * x / 4.0;
  };
  return anti(hi) - anti(lo);
}

std::vector<Sample> to_samples(const std::vector<RDPoint>& pts, int plane, double center) {
  std::vector<Sample> s;
  s.reserve(pts.size());
  for (const RDPoint& p : pts) {
    if (p.bits <= 0.0) throw std::invalid_argument("bd-rate: rate must be positive");
    s.push_back({p.psnr(plane) - center, std::log10(p.bits)});
  }
  std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.psnr < b.psnr; });
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].psnr <= s[i - 1].psnr)
      throw std::invalid_argument("bd-rate: PSNR values on a curve must be strictly monotonic");
  return s;
}

}  // namespace

BdResult bd_rate(const std::vector<RDPoint>& anchor, const std::vector<RDPoint>& test, int plane) {
  if (anchor.size() < 4 || test.size() < 4)
    throw std::invalid_argument("bd-rate: need at least 4 RD points per curve, got " +
                                std::to_string(anchor.size()) + " and " + std::to_string(test.size()));
  // Center PSNR to keep the cubic fit well conditioned.
  double center = 0.0;
  for (const RDPoint& p : anchor) center += p.psnr(plane);
  for (const RDPoint& p : test) center += p.psnr(plane);
  center /= static_cast<double>(anchor.size() + test.size());

  const std::vector<Sample> sa = to_samples(anchor, plane, center);
  const std::vector<Sample> st = to_samples(test, plane, center);
  const double lo = std::max(sa.front().psnr, st.front().psnr);
  const double hi = std::min(sa.back().psnr, st.back().psnr);
  if (hi <= lo) return {0.0, false, "no overlap"};

  const std::array<double, 4> fa = fit_cubic(sa);
  const std::array<double, 4> ft = fit_cubic(st);
  const double delta = (integrate_cubic(ft, lo, hi) - integrate_cubic(fa, lo, hi)) / (hi - lo);
  return {(std::pow(10.0, delta) - 1.0) * 100.0, true, ""};
}

double weighted_bd(double y, double cb, double cr) { return (6.0 * y + cb + cr) / 8.0; }

BdReport bd_report(const std::vector<RDPoint>& anchor, const std::vector<RDPoint>& test) {
  BdReport rep;
  rep.y = bd_rate(anchor, test, 0);
  rep.cb = bd_rate(anchor, test, 1);
  rep.cr = bd_rate(anchor, test, 2);
  rep.valid = rep.y.valid && rep.cb.valid && rep.cr.valid;
  if (!rep.valid) {
    rep.note = !rep.y.valid ? ("Y: " + rep.y.note)
                            : !rep.cb.valid ? ("Cb: " + rep.cb.note) : ("Cr: " + rep.cr.note);
    return rep;
  }
  rep.weighted = weighted_bd(rep.y.percent, rep.cb.percent, rep.cr.percent);
  return rep;
}

}  // namespace arpvc
