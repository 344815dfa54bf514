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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "multires/types.hpp"

namespace multires {

struct PruneResult {
  std::vector<double> sorted_weights;         // ascending
  std::vector<std::size_t> sorted_order;      // input index of each sorted entry
  std::size_t cut_index = 0;                  // m*, 1-based
  std::vector<ResolutionSpec> retained;       // input order
  std::vector<ResolutionSpec> discarded;      // input order
  std::vector<double> weights;                // as given, input order
  std::vector<ResolutionSpec> resolutions;    // as given
};

// Sorts the weights ascending (stable), takes the first largest adjacent gap
// s[m+1] - s[m] and keeps every resolution above it.
PruneResult Prune(std::span<const double> weights,
                  std::span<const ResolutionSpec> resolutions);

// One line per resolution, sorted by descending weight:
//   window<TAB>hop<TAB>mean_weight<TAB>{retained|discarded}
// preceded by '#' comment lines with the cut index and counts.
std::string PruneReport(const PruneResult& r);

}  // namespace multires
