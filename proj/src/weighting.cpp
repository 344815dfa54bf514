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

#include "multires/weighting.hpp"

#include <algorithm>
#include <cmath>

#include "multires/error.hpp"

namespace multires {

std::size_t PredictorHiddenWidth(std::size_t num_resolutions) {
  return std::max<std::size_t>(2, num_resolutions / 2);
}

WeightPredictorParams WeightPredictorParams::Zeros(std::size_t m, std::size_t hidden) {
  Require(m >= 1 && hidden >= 1, ErrorCode::kInvalidArgument,
          "weight predictor needs M >= 1 and hidden >= 1");
  WeightPredictorParams p;
  p.num_resolutions = m;
  p.hidden = hidden;
  p.fc1_weight.assign(hidden * m, 0.0);
  p.fc1_bias.assign(hidden, 0.0);
  p.fc2_weight.assign(m * hidden, 0.0);
  p.fc2_bias.assign(m, 0.0);
  return p;
}

WeightPredictorParams WeightPredictorParams::Random(std::size_t m, std::size_t hidden,
                                                    Rng& rng) {
  WeightPredictorParams p = Zeros(m, hidden);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(m));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : p.fc1_weight) w = rng.uniform(-b1, b1);
  for (double& w : p.fc2_weight) w = rng.uniform(-b2, b2);
  return p;
}

GateParams WeightPredictorParams::View() const {
  return {num_resolutions, hidden, fc1_weight, fc1_bias, fc2_weight, fc2_bias};
}

WeightPredictorGrads::WeightPredictorGrads(const WeightPredictorParams& p)
    : fc1_weight(p.fc1_weight.size(), 0.0),
      fc1_bias(p.fc1_bias.size(), 0.0),
      fc2_weight(p.fc2_weight.size(), 0.0),
      fc2_bias(p.fc2_bias.size(), 0.0) {}

GateGrads WeightPredictorGrads::View() {
  return {fc1_weight, fc1_bias, fc2_weight, fc2_bias};
}

std::vector<double> GlobalPool(const FeatureStack& stack) {
  return ChannelMeans(stack.data);
}

std::vector<double> PredictWeights(std::span<const double> pooled,
                                   const WeightPredictorParams& p) {
  return GateWeights(pooled, p.View());
}

FeatureStack ScaleStack(const FeatureStack& stack, std::span<const double> weights) {
  return {ScaleChannels(stack.data, weights), stack.resolutions};
}

WeightingResult WeightingForward(const FeatureStack& stack,
                                 const WeightPredictorParams& p) {
  WeightingResult r;
  r.scaled.data = GateForward(stack.data, p.View(), r.cache);
  r.scaled.resolutions = stack.resolutions;
  return r;
}

Tensor3 WeightingBackward(const FeatureStack& stack, const Tensor3& grad_scaled,
                          const WeightPredictorParams& p, const GateCache& cache,
                          WeightPredictorGrads& grads) {
  return GateBackward(stack.data, grad_scaled, p.View(), cache, grads.View());
}

std::vector<double> MeanWeights(std::span<const std::vector<double>> per_utterance) {
  Require(!per_utterance.empty(), ErrorCode::kInvalidArgument,
          "cannot average weights over an empty split");
  std::vector<double> mean(per_utterance.front().size(), 0.0);
  for (const auto& w : per_utterance) {
    Require(w.size() == mean.size(), ErrorCode::kShapeMismatch,
            "weight vectors differ in length");
    for (std::size_t i = 0; i < w.size(); ++i) mean[i] += w[i];
  }
  for (double& v : mean) v /= static_cast<double>(per_utterance.size());
  return mean;
}

}  // namespace multires
