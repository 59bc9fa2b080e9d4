// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "arpvc/codec.hpp"

namespace arpvc {

struct BdResult {
  double percent = 0.0;
  bool valid = false;
  std::string note;  // set when invalid, e.g. "no overlap"
};

/// Bjontegaard delta rate between two RD curves for one plane
/// (0 = Y, 1 = Cb, 2 = Cr). Cubic fit of log10(rate) over PSNR, closed-form
/// integration over the overlapping PSNR interval. Negative means the test
/// curve saves rate.
BdResult bd_rate(const std::vector<RDPoint>& anchor, const std::vector<RDPoint>& test, int plane);

/// (6*Y + Cb + Cr) / 8.
double weighted_bd(double y, double cb, double cr);

struct BdReport {
  BdResult y, cb, cr;
  double weighted = 0.0;
  bool valid = false;
  std::string note;
};

BdReport bd_report(const std::vector<RDPoint>& anchor, const std::vector<RDPoint>& test);

}  // namespace arpvc
