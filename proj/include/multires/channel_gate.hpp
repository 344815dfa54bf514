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

// Squeeze-and-excitation channel gate: global average pool per channel,
// FC -> ReLU -> FC -> sigmoid, then scale each channel by its gate. The
// resolution weighting block and the backend SE blocks both run on this
// kernel.

#pragma once

#include <span>
#include <vector>

#include "multires/tensor.hpp"

namespace multires {

struct GateParams {
  std::size_t channels = 0;
  std::size_t hidden = 0;
  std::span<const double> fc1_weight;  // hidden x channels
  std::span<const double> fc1_bias;    // hidden
  std::span<const double> fc2_weight;  // channels x hidden
  std::span<const double> fc2_bias;    // channels
};

struct GateGrads {
  std::span<double> fc1_weight;
  std::span<double> fc1_bias;
  std::span<double> fc2_weight;
  std::span<double> fc2_bias;
};

struct GateCache {
  std::vector<double> pooled;
  std::vector<double> hidden_pre;  // fc1 output before ReLU
  std::vector<double> hidden;      // after ReLU
  std::vector<double> gate;        // sigmoid output
};

double Sigmoid(double x);

std::vector<double> ChannelMeans(const Tensor3& x);

// gate = sigmoid(fc2 * relu(fc1 * pooled + b1) + b2). Fills `cache` when
// non-null.
std::vector<double> GateWeights(std::span<const double> pooled, const GateParams& p,
                                GateCache* cache = nullptr);

Tensor3 ScaleChannels(const Tensor3& x, std::span<const double> scale);

Tensor3 GateForward(const Tensor3& x, const GateParams& p, GateCache& cache);

// Reverse pass of GateForward. Parameter gradients are accumulated into
// `grads`; the returned tensor is dL/dx, which includes the path through the
// pooled statistics that feed the gate.
Tensor3 GateBackward(const Tensor3& x, const Tensor3& grad_out, const GateParams& p,
                     const GateCache& cache, const GateGrads& grads);

void ValidateGate(const GateParams& p);

}  // namespace multires
