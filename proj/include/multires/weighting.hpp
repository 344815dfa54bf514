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

// Per-resolution weight predictor. Each channel of the aligned stack is
// averaged to a scalar, two FC layers (ReLU, sigmoid) regress one weight per
// resolution, and the stack is rescaled channel-wise before it reaches the
// classifier.

#pragma once

#include <span>
#include <vector>

#include "multires/alignment.hpp"
#include "multires/channel_gate.hpp"
#include "multires/random.hpp"

namespace multires {

// max(2, floor(M / 2)).
std::size_t PredictorHiddenWidth(std::size_t num_resolutions);

struct WeightPredictorParams {
  std::size_t num_resolutions = 0;
  std::size_t hidden = 0;
  std::vector<double> fc1_weight;  // hidden x M
  std::vector<double> fc1_bias;
  std::vector<double> fc2_weight;  // M x hidden
  std::vector<double> fc2_bias;

  static WeightPredictorParams Zeros(std::size_t m, std::size_t hidden);
  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  static WeightPredictorParams Random(std::size_t m, std::size_t hidden, Rng& rng);

  GateParams View() const;
};

struct WeightPredictorGrads {
  std::vector<double> fc1_weight, fc1_bias, fc2_weight, fc2_bias;

  explicit WeightPredictorGrads(const WeightPredictorParams& p);
  GateGrads View();
};

std::vector<double> GlobalPool(const FeatureStack& stack);

// Per-resolution weights s_1..s_M, each in (0, 1).
std::vector<double> PredictWeights(std::span<const double> pooled,
                                   const WeightPredictorParams& p);

FeatureStack ScaleStack(const FeatureStack& stack, std::span<const double> weights);

struct WeightingResult {
  FeatureStack scaled;
  GateCache cache;
};

WeightingResult WeightingForward(const FeatureStack& stack,
                                 const WeightPredictorParams& p);

// Gradients of the composite pool -> FC -> FC -> sigmoid -> scale path.
// Returns dL/dstack; parameter gradients accumulate into `grads`.
Tensor3 WeightingBackward(const FeatureStack& stack, const Tensor3& grad_scaled,
                          const WeightPredictorParams& p, const GateCache& cache,
                          WeightPredictorGrads& grads);

// Arithmetic mean of per-utterance weight vectors.
std::vector<double> MeanWeights(std::span<const std::vector<double>> per_utterance);

}  // namespace multires
