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

#include "multires/backend.hpp"

#include <Eigen/Core>
#include <algorithm>

#include "multires/error.hpp"

namespace multires {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void Im2Col(const Tensor3& x, const ConvShape& s, ConvCache& c) {
  const std::size_t k = s.kernel;
  const auto pad = static_cast<std::ptrdiff_t>(s.pad());
  const std::size_t P = c.out_rows * c.out_cols;
  c.columns.assign(s.in_channels * k * k * P, 0.0);
  for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        double* dst = c.columns.data() + ((ci * k + ky) * k + kx) * P;
        for (std::size_t oy = 0; oy < c.out_rows; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * s.stride + ky) - pad;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(c.in_rows)) continue;
          const double* src = x.data.data() + (ci * c.in_rows + static_cast<std::size_t>(iy)) * c.in_cols;
          double* row = dst + oy * c.out_cols;
          for (std::size_t ox = 0; ox < c.out_cols; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * s.stride + kx) - pad;
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(c.in_cols)) {
              row[ox] = src[ix];
            }
          }
        }
      }
    }
  }
}

void Col2Im(std::span<const double> cols, const ConvShape& s, const ConvCache& c,
            Tensor3& dx) {
  const std::size_t k = s.kernel;
  const auto pad = static_cast<std::ptrdiff_t>(s.pad());
  const std::size_t P = c.out_rows * c.out_cols;
  for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const double* src = cols.data() + ((ci * k + ky) * k + kx) * P;
        for (std::size_t oy = 0; oy < c.out_rows; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * s.stride + ky) - pad;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(c.in_rows)) continue;
          double* dst = dx.data.data() + (ci * c.in_rows + static_cast<std::size_t>(iy)) * c.in_cols;
          const double* row = src + oy * c.out_cols;
          for (std::size_t ox = 0; ox < c.out_cols; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * s.stride + kx) - pad;
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(c.in_cols)) {
              dst[ix] += row[ox];
            }
          }
        }
      }
    }
  }
}

GateParams SeView(const BlockParams& p, std::size_t channels, std::size_t hidden) {
  return {channels, hidden, p.se_fc1_weight, p.se_fc1_bias, p.se_fc2_weight,
          p.se_fc2_bias};
}

}  // namespace

void ValidateBackendConfig(const BackendConfig& c) {
  Require(c.stem_channels >= 1, ErrorCode::kConfig, "backend.stem_channels must be >= 1");
  Require(c.stages >= 1, ErrorCode::kConfig, "backend.stages must be >= 1");
  Require(c.blocks_per_stage >= 1, ErrorCode::kConfig,
          "backend.blocks_per_stage must be >= 1");
  Require(c.se_reduction >= 1, ErrorCode::kConfig, "backend.se_reduction must be >= 1");
  Require(c.se_reduction <= c.stem_channels, ErrorCode::kConfig,
          "backend.se_reduction must not exceed backend.stem_channels");
  Require(c.n_classes == 2, ErrorCode::kConfig, "backend.n_classes must be 2");
  Require(c.stages <= 16, ErrorCode::kConfig, "backend.stages must be <= 16");
}

Tensor3 Conv2dForward(const Tensor3& x, std::span<const double> kernel,
                      std::span<const double> bias, const ConvShape& shape,
                      ConvCache* cache) {
  Require(shape.kernel == 1 || shape.kernel == 3, ErrorCode::kInvalidArgument,
          "conv kernel must be 1x1 or 3x3");
  Require(shape.stride == 1 || shape.stride == 2, ErrorCode::kInvalidArgument,
          "conv stride must be 1 or 2");
  Require(x.channels == shape.in_channels, ErrorCode::kShapeMismatch,
          "conv input has " + std::to_string(x.channels) + " channels, expected " +
              std::to_string(shape.in_channels));
  Require(kernel.size() == shape.weight_size() && bias.size() == shape.out_channels,
          ErrorCode::kShapeMismatch, "conv parameter shapes inconsistent");
  Require(x.rows >= 1 && x.cols >= 1, ErrorCode::kShapeMismatch, "empty conv input");

  ConvCache local;
  ConvCache& c = cache != nullptr ? *cache : local;
  c.in_rows = x.rows;
  c.in_cols = x.cols;
  c.out_rows = shape.OutDim(x.rows);
  c.out_cols = shape.OutDim(x.cols);
  Im2Col(x, shape, c);

  const std::size_t P = c.out_rows * c.out_cols;
  const std::size_t KK = shape.in_channels * shape.kernel * shape.kernel;
  Tensor3 y(shape.out_channels, c.out_rows, c.out_cols);
  Eigen::Map<const RowMat> K(kernel.data(), static_cast<Eigen::Index>(shape.out_channels),
                             static_cast<Eigen::Index>(KK));
  Eigen::Map<const RowMat> cols(c.columns.data(), static_cast<Eigen::Index>(KK),
                                static_cast<Eigen::Index>(P));
  Eigen::Map<RowMat> out(y.data.data(), static_cast<Eigen::Index>(shape.out_channels),
                         static_cast<Eigen::Index>(P));
  out.noalias() = K * cols;
  for (std::size_t o = 0; o < shape.out_channels; ++o) {
    out.row(static_cast<Eigen::Index>(o)).array() += bias[o];
  }
  return y;
}

Tensor3 Conv2dBackward(const Tensor3& grad_out, std::span<const double> kernel,
                       const ConvShape& shape, const ConvCache& cache,
                       std::span<double> grad_kernel, std::span<double> grad_bias,
                       bool want_input_grad) {
  const std::size_t P = cache.out_rows * cache.out_cols;
  const std::size_t KK = shape.in_channels * shape.kernel * shape.kernel;
  Require(grad_out.channels == shape.out_channels && grad_out.plane() == P,
          ErrorCode::kShapeMismatch, "conv output gradient shape mismatch");

  Eigen::Map<const RowMat> dY(grad_out.data.data(),
                              static_cast<Eigen::Index>(shape.out_channels),
                              static_cast<Eigen::Index>(P));
  Eigen::Map<const RowMat> cols(cache.columns.data(), static_cast<Eigen::Index>(KK),
                                static_cast<Eigen::Index>(P));
  Eigen::Map<RowMat> dK(grad_kernel.data(), static_cast<Eigen::Index>(shape.out_channels),
                        static_cast<Eigen::Index>(KK));
  dK.noalias() += dY * cols.transpose();
  for (std::size_t o = 0; o < shape.out_channels; ++o) {
    grad_bias[o] += dY.row(static_cast<Eigen::Index>(o)).sum();
  }
  if (!want_input_grad) return {};

  Eigen::Map<const RowMat> K(kernel.data(), static_cast<Eigen::Index>(shape.out_channels),
                             static_cast<Eigen::Index>(KK));
  std::vector<double> dcols(KK * P);
  Eigen::Map<RowMat> dC(dcols.data(), static_cast<Eigen::Index>(KK),
                        static_cast<Eigen::Index>(P));
  dC.noalias() = K.transpose() * dY;
  Tensor3 dx(shape.in_channels, cache.in_rows, cache.in_cols);
  Col2Im(dcols, shape, cache, dx);
  return dx;
}

Tensor3 Conv2d(const Tensor3& x, std::span<const double> kernel,
               std::span<const double> bias, std::size_t stride) {
  Require(bias.size() >= 1, ErrorCode::kShapeMismatch, "conv bias is empty");
  const ConvShape shape{x.channels, bias.size(), 3, stride};
  return Conv2dForward(x, kernel, bias, shape);
}

std::size_t SeBottleneck(std::size_t channels, std::size_t reduction) {
  return std::max<std::size_t>(1, channels / reduction);
}

Tensor3 SeBlock(const Tensor3& x, const GateParams& p) {
  GateCache cache;
  return GateForward(x, p, cache);
}

void ReluInPlace(Tensor3& x) {
  for (double& v : x.data) v = v < 0.0 ? 0.0 : v;
}

void ReluBackwardInPlace(const Tensor3& pre, Tensor3& grad) {
  for (std::size_t i = 0; i < grad.data.size(); ++i) {
    if (!(pre.data[i] > 0.0)) grad.data[i] = 0.0;
  }
}

Tensor3 ResidualBlockForward(const Tensor3& x, const BlockSpec& spec,
                             const BlockParams& p, BlockCache& cache) {
  cache.input = x;
  cache.conv1_out = Conv2dForward(x, p.conv1_weight, p.conv1_bias, spec.conv1(), &cache.conv1);
  Tensor3 h = cache.conv1_out;
  ReluInPlace(h);
  cache.conv2_out = Conv2dForward(h, p.conv2_weight, p.conv2_bias, spec.conv2(), &cache.conv2);
  Tensor3 out = GateForward(cache.conv2_out, SeView(p, spec.out_channels, spec.se_hidden),
                            cache.gate);
  if (spec.has_projection()) {
    const Tensor3 skip =
        Conv2dForward(x, p.proj_weight, p.proj_bias, spec.projection(), &cache.proj);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += skip.data[i];
  } else {
    Require(x.same_shape(out), ErrorCode::kShapeMismatch, "identity skip shape mismatch");
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += x.data[i];
  }
  cache.sum = out;
  ReluInPlace(out);
  return out;
}

Tensor3 ResidualBlockBackward(const Tensor3& grad_out, const BlockSpec& spec,
                              const BlockParams& p, const BlockCache& cache,
                              const BlockGrads& g) {
  Tensor3 dsum = grad_out;
  ReluBackwardInPlace(cache.sum, dsum);

  Tensor3 dx;
  if (spec.has_projection()) {
    dx = Conv2dBackward(dsum, p.proj_weight, spec.projection(), cache.proj, g.proj_weight,
                        g.proj_bias, true);
  } else {
    dx = dsum;
  }

  const GateGrads gg{g.se_fc1_weight, g.se_fc1_bias, g.se_fc2_weight, g.se_fc2_bias};
  Tensor3 dconv2 = GateBackward(cache.conv2_out, dsum,
                                SeView(p, spec.out_channels, spec.se_hidden), cache.gate, gg);
  Tensor3 dh = Conv2dBackward(dconv2, p.conv2_weight, spec.conv2(), cache.conv2,
                              g.conv2_weight, g.conv2_bias, true);
  ReluBackwardInPlace(cache.conv1_out, dh);
  const Tensor3 dx_main = Conv2dBackward(dh, p.conv1_weight, spec.conv1(), cache.conv1,
                                         g.conv1_weight, g.conv1_bias, true);
  for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dx_main.data[i];
  return dx;
}

}  // namespace multires
