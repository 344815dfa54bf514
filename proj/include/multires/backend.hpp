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

// Building blocks of the SE-residual classifier: "same"-padded 2-D
// cross-correlation, squeeze-and-excitation recalibration and the residual
// block that combines them. No batch normalisation. All passes are exact
// reverse-mode; ReLU'(0) is taken as 0.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "multires/channel_gate.hpp"
#include "multires/tensor.hpp"

namespace multires {

struct BackendConfig {
  std::uint32_t stem_channels = 16;
  std::uint32_t stages = 3;
  std::uint32_t blocks_per_stage = 2;
  std::uint32_t se_reduction = 4;
  std::uint32_t n_classes = 2;

  bool operator==(const BackendConfig&) const = default;
};

void ValidateBackendConfig(const BackendConfig& c);

// kernel is 1 (no padding) or 3 (zero padding 1); output dims are
// ceil(dim / stride) in both cases.
struct ConvShape {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;

  std::size_t pad() const { return kernel / 2; }
  std::size_t weight_size() const {
    return out_channels * in_channels * kernel * kernel;
  }
  std::size_t OutDim(std::size_t d) const { return (d + stride - 1) / stride; }
};

struct ConvCache {
  std::vector<double> columns;  // (in_channels * k * k) x (out_rows * out_cols)
  std::size_t in_rows = 0, in_cols = 0, out_rows = 0, out_cols = 0;
};

// kernel layout: out x in x k x k.
Tensor3 Conv2dForward(const Tensor3& x, std::span<const double> kernel,
                      std::span<const double> bias, const ConvShape& shape,
                      ConvCache* cache = nullptr);

// Accumulates dL/dkernel and dL/dbias; returns dL/dx when requested (an empty
// tensor otherwise).
Tensor3 Conv2dBackward(const Tensor3& grad_out, std::span<const double> kernel,
                       const ConvShape& shape, const ConvCache& cache,
                       std::span<double> grad_kernel, std::span<double> grad_bias,
                       bool want_input_grad);

// 3x3 "same" convolution with stride 1 or 2.
Tensor3 Conv2d(const Tensor3& x, std::span<const double> kernel,
               std::span<const double> bias, std::size_t stride);

// max(1, channels / reduction).
std::size_t SeBottleneck(std::size_t channels, std::size_t reduction);

Tensor3 SeBlock(const Tensor3& x, const GateParams& p);

void ReluInPlace(Tensor3& x);
// grad *= [pre > 0]
void ReluBackwardInPlace(const Tensor3& pre, Tensor3& grad);

struct BlockSpec {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t stride = 1;
  std::size_t se_hidden = 1;

  bool has_projection() const { return stride != 1 || in_channels != out_channels; }
  ConvShape conv1() const { return {in_channels, out_channels, 3, stride}; }
  ConvShape conv2() const { return {out_channels, out_channels, 3, 1}; }
  ConvShape projection() const { return {in_channels, out_channels, 1, stride}; }
};

template <typename T>
struct BlockTensors {
  std::span<T> conv1_weight, conv1_bias;
  std::span<T> conv2_weight, conv2_bias;
  std::span<T> se_fc1_weight, se_fc1_bias, se_fc2_weight, se_fc2_bias;
  std::span<T> proj_weight, proj_bias;  // empty without projection
};

using BlockParams = BlockTensors<const double>;
using BlockGrads = BlockTensors<double>;

struct BlockCache {
  Tensor3 input;
  ConvCache conv1, conv2, proj;
  Tensor3 conv1_out;  // before ReLU
  Tensor3 conv2_out;
  GateCache gate;
  Tensor3 sum;  // se output + skip, before the final ReLU
};

// out = relu(se(conv2(relu(conv1(x)))) + skip(x)); skip is identity or a
// 1x1 projection when the stride or channel count changes.
Tensor3 ResidualBlockForward(const Tensor3& x, const BlockSpec& spec,
                             const BlockParams& p, BlockCache& cache);

Tensor3 ResidualBlockBackward(const Tensor3& grad_out, const BlockSpec& spec,
                              const BlockParams& p, const BlockCache& cache,
                              const BlockGrads& g);

}  // namespace multires
