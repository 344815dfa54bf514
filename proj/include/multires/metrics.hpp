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

// Countermeasure scoring. Scores are "higher = more bona fide". At
// threshold t a bona fide trial is missed when score < t and a spoof trial
// is falsely accepted when score >= t.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "multires/signal_io.hpp"

namespace multires {

struct DetPoint {
  double threshold = 0.0;
  double p_miss = 0.0;
  double p_fa = 0.0;

  bool operator==(const DetPoint&) const = default;
};

// Every distinct score plus -inf / +inf sentinels, ascending.
std::vector<DetPoint> DetPoints(std::span<const ScoreRecord> records);

// Crossing of P_miss and P_fa, linearly interpolated between the two
// bracketing DET points.
double Eer(std::span<const ScoreRecord> records);
double EerFromDet(std::span<const DetPoint> det);

// Reduced two-coefficient tandem cost. C1 and C2 fold the ASV operating
// point and priors; they are supplied by the caller.
struct TdcfParams {
  double c1 = 1.0;
  double c2 = 1.0;

  bool operator==(const TdcfParams&) const = default;
};

// min over thresholds of (C1 P_miss + C2 P_fa) / min(C1, C2).
double MinTdcf(std::span<const ScoreRecord> records, const TdcfParams& p);
double MinTdcfFromDet(std::span<const DetPoint> det, const TdcfParams& p);

std::string DetCsv(std::span<const DetPoint> det);

}  // namespace multires
