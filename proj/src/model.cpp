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

#include "multires/model.hpp"

#include <cmath>
#include <string>

#include "multires/error.hpp"
#include "multires/random.hpp"
#include "multires/weighting.hpp"

namespace multires {

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
  Require(!spec_.resolutions.empty(), ErrorCode::kConfig,
          "model needs at least one resolution");
  ValidateBackendConfig(spec_.backend);
  const std::size_t M = spec_.num_resolutions();
  const auto& cfg = spec_.backend;

  weighting_hidden_ = PredictorHiddenWidth(M);
  const std::size_t h = weighting_hidden_;
  wfc1_w_ = layout_.Add("weighting.fc1.weight", {h, M}, M, false);
  wfc1_b_ = layout_.Add("weighting.fc1.bias", {h}, M, true);
  wfc2_w_ = layout_.Add("weighting.fc2.weight", {M, h}, h, false);
  wfc2_b_ = layout_.Add("weighting.fc2.bias", {M}, h, true);

  stem_shape_ = {M, cfg.stem_channels, 3, 1};
  stem_w_ = layout_.Add("stem.weight", {cfg.stem_channels, M, 3, 3}, M * 9, false);
  stem_b_ = layout_.Add("stem.bias", {cfg.stem_channels}, M * 9, true);

  std::size_t channels = cfg.stem_channels;
  for (std::uint32_t s = 0; s < cfg.stages; ++s) {
    for (std::uint32_t b = 0; b < cfg.blocks_per_stage; ++b) {
      BlockSlots bs;
      bs.spec.in_channels = channels;
      if (s > 0 && b == 0) {
        bs.spec.stride = 2;
        channels *= 2;
      }
      bs.spec.out_channels = channels;
      bs.spec.se_hidden = SeBottleneck(channels, cfg.se_reduction);
      const std::size_t cin = bs.spec.in_channels, cout = channels,
                        hid = bs.spec.se_hidden;
      const std::string prefix =
          "stage" + std::to_string(s) + ".block" + std::to_string(b) + ".";
      bs.conv1_w = layout_.Add(prefix + "conv1.weight", {cout, cin, 3, 3}, cin * 9, false);
      bs.conv1_b = layout_.Add(prefix + "conv1.bias", {cout}, cin * 9, true);
      bs.conv2_w = layout_.Add(prefix + "conv2.weight", {cout, cout, 3, 3}, cout * 9, false);
      bs.conv2_b = layout_.Add(prefix + "conv2.bias", {cout}, cout * 9, true);
      bs.se1_w = layout_.Add(prefix + "se.fc1.weight", {hid, cout}, cout, false);
      bs.se1_b = layout_.Add(prefix + "se.fc1.bias", {hid}, cout, true);
      bs.se2_w = layout_.Add(prefix + "se.fc2.weight", {cout, hid}, hid, false);
      bs.se2_b = layout_.Add(prefix + "se.fc2.bias", {cout}, hid, true);
      if (bs.spec.has_projection()) {
        bs.proj_w = layout_.Add(prefix + "proj.weight", {cout, cin, 1, 1}, cin, false);
        bs.proj_b = layout_.Add(prefix + "proj.bias", {cout}, cin, true);
      }
      blocks_.push_back(bs);
    }
  }
  final_channels_ = channels;
  head_w_ = layout_.Add("head.weight", {cfg.n_classes, channels}, channels, false);
  head_b_ = layout_.Add("head.bias", {cfg.n_classes}, channels, true);
}

std::vector<double> Model::InitParams(std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> params(layout_.total(), 0.0);
  for (const auto& slot : layout_.slots()) {
    if (slot.is_bias) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(slot.fan_in));
    for (std::size_t i = 0; i < slot.size; ++i) {
      params[slot.offset + i] = rng.uniform(-bound, bound);
    }
  }
  return params;
}

template <typename T>
BlockTensors<T> Model::BlockView(std::span<T> flat, const BlockSlots& b) const {
  BlockTensors<T> v;
  v.conv1_weight = layout_.View(flat, b.conv1_w);
  v.conv1_bias = layout_.View(flat, b.conv1_b);
  v.conv2_weight = layout_.View(flat, b.conv2_w);
  v.conv2_bias = layout_.View(flat, b.conv2_b);
  v.se_fc1_weight = layout_.View(flat, b.se1_w);
  v.se_fc1_bias = layout_.View(flat, b.se1_b);
  v.se_fc2_weight = layout_.View(flat, b.se2_w);
  v.se_fc2_bias = layout_.View(flat, b.se2_b);
  if (b.proj_w != SIZE_MAX) {
    v.proj_weight = layout_.View(flat, b.proj_w);
    v.proj_bias = layout_.View(flat, b.proj_b);
  }
  return v;
}

GateParams Model::WeightingParams(std::span<const double> params) const {
  return {spec_.num_resolutions(), weighting_hidden_, layout_.View(params, wfc1_w_),
          layout_.View(params, wfc1_b_), layout_.View(params, wfc2_w_),
          layout_.View(params, wfc2_b_)};
}

std::vector<double> Model::Forward(std::span<const double> params, const Tensor3& stack,
                                   ModelCache& cache) const {
  Require(params.size() == layout_.total(), ErrorCode::kShapeMismatch,
          "parameter vector has " + std::to_string(params.size()) + " entries, expected " +
              std::to_string(layout_.total()));
  Require(stack.channels == spec_.num_resolutions(), ErrorCode::kShapeMismatch,
          "input stack has " + std::to_string(stack.channels) + " channels, model expects " +
              std::to_string(spec_.num_resolutions()));

  cache.input = stack;
  cache.scaled = GateForward(stack, WeightingParams(params), cache.weighting);

  cache.stem_out = Conv2dForward(cache.scaled, layout_.View(params, stem_w_),
                                 layout_.View(params, stem_b_), stem_shape_, &cache.stem);
  Tensor3 x = cache.stem_out;
  ReluInPlace(x);

  cache.blocks.resize(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    x = ResidualBlockForward(x, blocks_[i].spec, BlockView(params, blocks_[i]),
                             cache.blocks[i]);
  }

  cache.pooled = ChannelMeans(x);
  cache.final_rows = x.rows;
  cache.final_cols = x.cols;

  const auto hw = layout_.View(params, head_w_);
  const auto hb = layout_.View(params, head_b_);
  const std::size_t n_classes = spec_.backend.n_classes;
  std::vector<double> logits(n_classes);
  for (std::size_t k = 0; k < n_classes; ++k) {
    double z = hb[k];
    for (std::size_t c = 0; c < final_channels_; ++c) {
      z += hw[k * final_channels_ + c] * cache.pooled[c];
    }
    logits[k] = z;
  }
  return logits;
}

std::vector<double> Model::Logits(std::span<const double> params,
                                  const Tensor3& stack) const {
  ModelCache cache;
  return Forward(params, stack, cache);
}

void Model::Backward(std::span<const double> params, const ModelCache& cache,
                     std::span<const double> grad_logits, std::span<double> grads,
                     Tensor3* grad_input) const {
  Require(grads.size() == layout_.total(), ErrorCode::kShapeMismatch,
          "gradient vector size mismatch");
  Require(grad_logits.size() == spec_.backend.n_classes, ErrorCode::kShapeMismatch,
          "logit gradient size mismatch");

  const auto hw = layout_.View(params, head_w_);
  auto ghw = layout_.View(grads, head_w_);
  auto ghb = layout_.View(grads, head_b_);
  std::vector<double> dpooled(final_channels_, 0.0);
  for (std::size_t k = 0; k < grad_logits.size(); ++k) {
    ghb[k] += grad_logits[k];
    for (std::size_t c = 0; c < final_channels_; ++c) {
      ghw[k * final_channels_ + c] += grad_logits[k] * cache.pooled[c];
      dpooled[c] += hw[k * final_channels_ + c] * grad_logits[k];
    }
  }

  Tensor3 dx(final_channels_, cache.final_rows, cache.final_cols);
  const double inv = 1.0 / static_cast<double>(dx.plane());
  for (std::size_t c = 0; c < final_channels_; ++c) {
    for (double& v : dx.channel(c)) v = dpooled[c] * inv;
  }

  for (std::size_t i = blocks_.size(); i-- > 0;) {
    dx = ResidualBlockBackward(dx, blocks_[i].spec, BlockView(params, blocks_[i]),
                               cache.blocks[i], BlockView(grads, blocks_[i]));
  }

  ReluBackwardInPlace(cache.stem_out, dx);
  Tensor3 dscaled = Conv2dBackward(dx, layout_.View(params, stem_w_), stem_shape_,
                                   cache.stem, layout_.View(grads, stem_w_),
                                   layout_.View(grads, stem_b_), true);

  const GateGrads wg{layout_.View(grads, wfc1_w_), layout_.View(grads, wfc1_b_),
                     layout_.View(grads, wfc2_w_), layout_.View(grads, wfc2_b_)};
  Tensor3 dinput =
      GateBackward(cache.input, dscaled, WeightingParams(params), cache.weighting, wg);
  if (grad_input != nullptr) *grad_input = std::move(dinput);
}

std::vector<double> Model::ResolutionWeights(std::span<const double> params,
                                             const Tensor3& stack) const {
  Require(stack.channels == spec_.num_resolutions(), ErrorCode::kShapeMismatch,
          "input stack has " + std::to_string(stack.channels) + " channels, model expects " +
              std::to_string(spec_.num_resolutions()));
  return GateWeights(ChannelMeans(stack), WeightingParams(params));
}

}  // namespace multires
