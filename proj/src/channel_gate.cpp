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

#include "multires/channel_gate.hpp"

#include <cmath>

#include "multires/error.hpp"
#include "multires/params.hpp"

namespace multires {

std::size_t ParamLayout::Add(std::string name, std::vector<std::size_t> shape,
                             std::size_t fan_in, bool is_bias) {
  ParamSlot s;
  s.name = std::move(name);
  s.offset = total_;
  s.size = 1;
  for (std::size_t d : shape) s.size *= d;
  s.shape = std::move(shape);
  s.fan_in = fan_in;
  s.is_bias = is_bias;
  total_ += s.size;
  slots_.push_back(std::move(s));
  return slots_.size() - 1;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void ValidateGate(const GateParams& p) {
  const bool ok = p.channels >= 1 && p.hidden >= 1 &&
                  p.fc1_weight.size() == p.hidden * p.channels &&
                  p.fc1_bias.size() == p.hidden &&
                  p.fc2_weight.size() == p.channels * p.hidden &&
                  p.fc2_bias.size() == p.channels;
  Require(ok, ErrorCode::kShapeMismatch, "channel gate parameter shapes inconsistent");
}

std::vector<double> ChannelMeans(const Tensor3& x) {
  std::vector<double> v(x.channels, 0.0);
  const double inv = 1.0 / static_cast<double>(x.plane());
  for (std::size_t c = 0; c < x.channels; ++c) {
    double s = 0.0;
    for (double e : x.channel(c)) s += e;
    v[c] = s * inv;
  }
  return v;
}

std::vector<double> GateWeights(std::span<const double> pooled, const GateParams& p,
                                GateCache* cache) {
  ValidateGate(p);
  Require(pooled.size() == p.channels, ErrorCode::kShapeMismatch,
          "gate input has " + std::to_string(pooled.size()) + " entries, expected " +
              std::to_string(p.channels));
  std::vector<double> pre(p.hidden), hid(p.hidden), gate(p.channels);
  for (std::size_t j = 0; j < p.hidden; ++j) {
    double z = p.fc1_bias[j];
    for (std::size_t c = 0; c < p.channels; ++c) {
      z += p.fc1_weight[j * p.channels + c] * pooled[c];
    }
    pre[j] = z;
    hid[j] = z < 0.0 ? 0.0 : z;
  }
  for (std::size_t c = 0; c < p.channels; ++c) {
    double z = p.fc2_bias[c];
    for (std::size_t j = 0; j < p.hidden; ++j) z += p.fc2_weight[c * p.hidden + j] * hid[j];
    gate[c] = Sigmoid(z);
  }
  if (cache != nullptr) {
    cache->pooled.assign(pooled.begin(), pooled.end());
    cache->hidden_pre = pre;
    cache->hidden = hid;
    cache->gate = gate;
  }
  return gate;
}

Tensor3 ScaleChannels(const Tensor3& x, std::span<const double> scale) {
  Require(scale.size() == x.channels, ErrorCode::kShapeMismatch,
          "scale vector length " + std::to_string(scale.size()) + " != channels " +
              std::to_string(x.channels));
  Tensor3 y = x;
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (double& v : y.channel(c)) v *= scale[c];
  }
  return y;
}

Tensor3 GateForward(const Tensor3& x, const GateParams& p, GateCache& cache) {
  const std::vector<double> pooled = ChannelMeans(x);
  const std::vector<double> gate = GateWeights(pooled, p, &cache);
  return ScaleChannels(x, gate);
}

Tensor3 GateBackward(const Tensor3& x, const Tensor3& grad_out, const GateParams& p,
                     const GateCache& cache, const GateGrads& grads) {
  Require(x.same_shape(grad_out), ErrorCode::kShapeMismatch,
          "gate gradient shape mismatch");
  const std::size_t C = p.channels;
  const std::size_t H = p.hidden;

  // d gate[c] = sum_i dy[c,i] * x[c,i]
  std::vector<double> dz2(C);
  for (std::size_t c = 0; c < C; ++c) {
    const auto xc = x.channel(c);
    const auto gc = grad_out.channel(c);
    double s = 0.0;
    for (std::size_t i = 0; i < xc.size(); ++i) s += gc[i] * xc[i];
    const double g = cache.gate[c];
    dz2[c] = s * g * (1.0 - g);
  }

  std::vector<double> dhid(H, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    grads.fc2_bias[c] += dz2[c];
    for (std::size_t j = 0; j < H; ++j) {
      grads.fc2_weight[c * H + j] += dz2[c] * cache.hidden[j];
      dhid[j] += p.fc2_weight[c * H + j] * dz2[c];
    }
  }

  std::vector<double> dpooled(C, 0.0);
  for (std::size_t j = 0; j < H; ++j) {
    const double dz1 = cache.hidden_pre[j] > 0.0 ? dhid[j] : 0.0;
    grads.fc1_bias[j] += dz1;
    for (std::size_t c = 0; c < C; ++c) {
      grads.fc1_weight[j * C + c] += dz1 * cache.pooled[c];
      dpooled[c] += p.fc1_weight[j * C + c] * dz1;
    }
  }

  Tensor3 dx(x.channels, x.rows, x.cols);
  const double inv = 1.0 / static_cast<double>(x.plane());
  for (std::size_t c = 0; c < C; ++c) {
    const auto gc = grad_out.channel(c);
    auto dc = dx.channel(c);
    const double g = cache.gate[c];
    const double pool_term = dpooled[c] * inv;
    for (std::size_t i = 0; i < dc.size(); ++i) dc[i] = gc[i] * g + pool_term;
  }
  return dx;
}

}  // namespace multires
