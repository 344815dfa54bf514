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

#include <cstdint>
#include <span>
#include <vector>

#include "multires/backend.hpp"
#include "multires/params.hpp"
#include "multires/types.hpp"

namespace multires {

// Architecture of the end-to-end classifier: the resolution weight
// predictor followed by the SE-residual backend. The backend input channel
// count is the number of resolutions.
struct ModelSpec {
  std::vector<ResolutionSpec> resolutions;
  BackendConfig backend;

  std::size_t num_resolutions() const { return resolutions.size(); }
  bool operator==(const ModelSpec&) const = default;
};

struct ModelCache {
  Tensor3 input;
  Tensor3 scaled;
  GateCache weighting;
  ConvCache stem;
  Tensor3 stem_out;  // before ReLU
  std::vector<BlockCache> blocks;
  std::vector<double> pooled;  // global average of the last block output
  std::size_t final_rows = 0, final_cols = 0;
};

// Stateless with respect to parameters: every pass receives the flat
// parameter vector and its own cache, so one Model can serve several
// threads.
class Model {
 public:
  explicit Model(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t num_params() const { return layout_.total(); }
  std::size_t num_blocks() const { return blocks_.size(); }
  const BlockSpec& block_spec(std::size_t i) const { return blocks_[i].spec; }

  // Weights uniform in +-1/sqrt(fan_in); biases zero.
  std::vector<double> InitParams(std::uint64_t seed) const;

  // Logits {spoof, bonafide}.
  std::vector<double> Forward(std::span<const double> params, const Tensor3& stack,
                              ModelCache& cache) const;
  std::vector<double> Logits(std::span<const double> params, const Tensor3& stack) const;

  // Accumulates parameter gradients into `grads`. Writes dL/dstack when
  // `grad_input` is non-null.
  void Backward(std::span<const double> params, const ModelCache& cache,
                std::span<const double> grad_logits, std::span<double> grads,
                Tensor3* grad_input = nullptr) const;

  // Predicted per-resolution weights for one stack.
  std::vector<double> ResolutionWeights(std::span<const double> params,
                                        const Tensor3& stack) const;

  GateParams WeightingParams(std::span<const double> params) const;
  std::size_t head_weight_slot() const { return head_w_; }
  std::size_t head_bias_slot() const { return head_b_; }

 private:
  struct BlockSlots {
    BlockSpec spec;
    std::size_t conv1_w, conv1_b, conv2_w, conv2_b;
    std::size_t se1_w, se1_b, se2_w, se2_b;
    std::size_t proj_w = SIZE_MAX, proj_b = SIZE_MAX;
  };

  template <typename T>
  BlockTensors<T> BlockView(std::span<T> flat, const BlockSlots& b) const;

  ModelSpec spec_;
  ParamLayout layout_;
  std::size_t weighting_hidden_ = 0;
  std::size_t wfc1_w_, wfc1_b_, wfc2_w_, wfc2_b_;
  ConvShape stem_shape_;
  std::size_t stem_w_, stem_b_;
  std::vector<BlockSlots> blocks_;
  std::size_t final_channels_ = 0;
  std::size_t head_w_, head_b_;
};

}  // namespace multires
