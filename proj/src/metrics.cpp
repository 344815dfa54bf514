// Copyright 2026 The multires Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "multires/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "multires/error.hpp"

namespace multires {

std::vector<DetPoint> DetPoints(std::span<const ScoreRecord> records) {
  std::vector<double> bona, spoof;
  for (const auto& r : records) {
    Require(std::isfinite(r.score), ErrorCode::kInvalidArgument,
            "non-finite score for '" + r.utt_id + "'");
    (r.label == Label::kBonafide ? bona : spoof).push_back(r.score);
  }
  Require(!bona.empty() && !spoof.empty(), ErrorCode::kInvalidArgument,
          "DET needs both bonafide and spoof trials");
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());

  std::vector<double> thresholds;
  thresholds.reserve(records.size() + 2);
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  for (const auto& r : records) thresholds.push_back(r.score);
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const auto nb = static_cast<double>(bona.size());
  const auto ns = static_cast<double>(spoof.size());
  std::vector<DetPoint> det;
  det.reserve(thresholds.size());
  for (double t : thresholds) {
    // bona fide below t, spoof at or above t
    const auto miss = std::lower_bound(bona.begin(), bona.end(), t) - bona.begin();
    const auto fa = spoof.end() - std::lower_bound(spoof.begin(), spoof.end(), t);
    det.push_back({t, static_cast<double>(miss) / nb, static_cast<double>(fa) / ns});
  }
  return det;
}

double EerFromDet(std::span<const DetPoint> det) {
  Require(!det.empty(), ErrorCode::kInvalidArgument, "empty DET curve");
  for (std::size_t k = 0; k < det.size(); ++k) {
    const double d1 = det[k].p_miss - det[k].p_fa;
    if (d1 == 0.0) return det[k].p_miss;
    if (d1 > 0.0) {
      Require(k > 0, ErrorCode::kInvalidArgument, "DET curve does not start at P_miss=0");
      const double d0 = det[k - 1].p_miss - det[k - 1].p_fa;
      const double t = -d0 / (d1 - d0);
      return det[k - 1].p_miss + t * (det[k].p_miss - det[k - 1].p_miss);
    }
  }
  Fail(ErrorCode::kInvalidArgument, "DET curve never crosses");
}

double Eer(std::span<const ScoreRecord> records) { return EerFromDet(DetPoints(records)); }

double MinTdcfFromDet(std::span<const DetPoint> det, const TdcfParams& p) {
  Require(p.c1 > 0.0 && p.c2 > 0.0, ErrorCode::kInvalidArgument,
          "t-DCF coefficients must be positive");
  const double norm = std::min(p.c1, p.c2);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d : det) best = std::min(best, (p.c1 * d.p_miss + p.c2 * d.p_fa) / norm);
  return best;
}

double MinTdcf(std::span<const ScoreRecord> records, const TdcfParams& p) {
  Require(p.c1 > 0.0 && p.c2 > 0.0, ErrorCode::kInvalidArgument,
          "t-DCF coefficients must be positive");
  return MinTdcfFromDet(DetPoints(records), p);
}

std::string DetCsv(std::span<const DetPoint> det) {
  std::ostringstream out;
  out << "threshold,p_miss,p_fa\n" << std::setprecision(17);
  for (const auto& d : det) {
    if (std::isinf(d.threshold)) {
      out << (d.threshold < 0 ? "-inf" : "inf");
    } else {
      out << d.threshold;
    }
    out << ',' << d.p_miss << ',' << d.p_fa << '\n';
  }
  return out.str();
}

}  // namespace multires
