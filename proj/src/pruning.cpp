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

#include "multires/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "multires/error.hpp"

namespace multires {

PruneResult Prune(std::span<const double> weights,
                  std::span<const ResolutionSpec> resolutions) {
  const std::size_t M = weights.size();
  Require(M == resolutions.size(), ErrorCode::kShapeMismatch,
          "weight count differs from resolution count");
  Require(M >= 2, ErrorCode::kInvalidArgument, "pruning needs at least 2 resolutions");
  for (double w : weights) {
    Require(std::isfinite(w), ErrorCode::kInvalidArgument, "non-finite resolution weight");
  }

  PruneResult r;
  r.weights.assign(weights.begin(), weights.end());
  r.resolutions.assign(resolutions.begin(), resolutions.end());
  r.sorted_order.resize(M);
  std::iota(r.sorted_order.begin(), r.sorted_order.end(), std::size_t{0});
  std::stable_sort(r.sorted_order.begin(), r.sorted_order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });
  for (std::size_t i : r.sorted_order) r.sorted_weights.push_back(weights[i]);

  // m* is 1-based: gap m sits between sorted positions m and m+1.
  std::size_t best = 1;
  double best_gap = r.sorted_weights[1] - r.sorted_weights[0];
  for (std::size_t m = 2; m < M; ++m) {
    const double gap = r.sorted_weights[m] - r.sorted_weights[m - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best = m;
    }
  }
  r.cut_index = best;

  std::vector<bool> keep(M, false);
  for (std::size_t pos = best; pos < M; ++pos) keep[r.sorted_order[pos]] = true;
  for (std::size_t i = 0; i < M; ++i) {
    (keep[i] ? r.retained : r.discarded).push_back(resolutions[i]);
  }
  return r;
}

std::string PruneReport(const PruneResult& r) {
  const std::size_t M = r.weights.size();
  std::ostringstream out;
  out << "# cut_index=" << r.cut_index << " retained=" << r.retained.size()
      << " discarded=" << r.discarded.size() << " total=" << M << '\n';
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.weights[a] > r.weights[b];
  });
  out << std::setprecision(9);
  for (std::size_t i : order) {
    const bool kept = std::find(r.retained.begin(), r.retained.end(), r.resolutions[i]) !=
                      r.retained.end();
    out << r.resolutions[i].window_len << '\t' << r.resolutions[i].hop_len << '\t'
        << r.weights[i] << '\t' << (kept ? "retained" : "discarded") << '\n';
  }
  return out.str();
}

}  // namespace multires
