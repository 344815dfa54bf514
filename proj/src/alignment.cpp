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

#include "multires/alignment.hpp"

#include <algorithm>

#include "multires/error.hpp"

namespace multires {

const char* ToString(AlignMethod m) {
  return m == AlignMethod::kAdaptivePool ? "adaptive_pool" : "nearest";
}

AlignMethod ParseAlignMethod(const std::string& s) {
  if (s == "adaptive_pool") return AlignMethod::kAdaptivePool;
  if (s == "nearest") return AlignMethod::kNearest;
  Fail(ErrorCode::kConfig, "unknown alignment method '" + s + "'");
}

std::pair<std::size_t, std::size_t> AdaptiveBin(std::size_t i, std::size_t in,
                                                std::size_t out) {
  const std::size_t begin = (i * in) / out;
  const std::size_t end = ((i + 1) * in + out - 1) / out;
  return {begin, end};
}

std::vector<double> AdaptiveAvgPool1d(std::span<const double> x, std::size_t out) {
  const std::size_t in = x.size();
  Require(in >= 1 && out >= 1, ErrorCode::kInvalidArgument,
          "adaptive pooling needs non-empty input and output");
  std::vector<double> y(out);
  for (std::size_t i = 0; i < out; ++i) {
    const auto [b, e] = AdaptiveBin(i, in, out);
    double s = 0.0;
    for (std::size_t k = b; k < e; ++k) s += x[k];
    y[i] = s / static_cast<double>(e - b);
  }
  return y;
}

Matrix AdaptiveAvgPool(const Matrix& m, std::size_t out_rows, std::size_t out_cols) {
  Require(m.rows >= 1 && m.cols >= 1 && out_rows >= 1 && out_cols >= 1,
          ErrorCode::kInvalidArgument, "adaptive pooling needs non-empty dims");
  if (m.rows == out_rows && m.cols == out_cols) return m;

  // Rows: pool each column over the time axis.
  Matrix tmp(out_rows, m.cols);
  for (std::size_t i = 0; i < out_rows; ++i) {
    const auto [b, e] = AdaptiveBin(i, m.rows, out_rows);
    const auto n = static_cast<double>(e - b);
    auto dst = tmp.row(i);
    for (std::size_t r = b; r < e; ++r) {
      const auto src = m.row(r);
      for (std::size_t c = 0; c < m.cols; ++c) dst[c] += src[c];
    }
    for (double& v : dst) v /= n;
  }
  if (m.cols == out_cols) return tmp;

  Matrix out(out_rows, out_cols);
  for (std::size_t r = 0; r < out_rows; ++r) {
    const auto pooled = AdaptiveAvgPool1d(tmp.row(r), out_cols);
    std::copy(pooled.begin(), pooled.end(), out.row(r).begin());
  }
  return out;
}

Matrix NearestUpsample(const Matrix& m, std::size_t out_rows, std::size_t out_cols) {
  Require(m.rows >= 1 && m.cols >= 1 && out_rows >= 1 && out_cols >= 1,
          ErrorCode::kInvalidArgument, "nearest upsampling needs non-empty dims");
  Matrix out(out_rows, out_cols);
  for (std::size_t i = 0; i < out_rows; ++i) {
    const std::size_t si = (i * m.rows) / out_rows;
    for (std::size_t j = 0; j < out_cols; ++j) {
      out(i, j) = m(si, (j * m.cols) / out_cols);
    }
  }
  return out;
}

Matrix Align(const Matrix& m, AlignMethod method, TargetDims target) {
  return method == AlignMethod::kAdaptivePool
             ? AdaptiveAvgPool(m, target.frames, target.bins)
             : NearestUpsample(m, target.frames, target.bins);
}

TargetDims MaxDims(std::span<const FeatureMap> maps) {
  TargetDims d;
  for (const auto& m : maps) {
    d.frames = std::max(d.frames, m.data.rows);
    d.bins = std::max(d.bins, m.data.cols);
  }
  return d;
}

FeatureStack AlignAndStack(std::span<const FeatureMap> maps, AlignMethod method,
                           std::optional<TargetDims> target) {
  Require(!maps.empty(), ErrorCode::kInvalidArgument, "no feature maps to stack");
  const TargetDims dims = target.value_or(MaxDims(maps));
  Require(dims.frames >= 1 && dims.bins >= 1, ErrorCode::kInvalidArgument,
          "alignment target must be at least 1x1");
  FeatureStack stack{Tensor3(maps.size(), dims.frames, dims.bins), {}};
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const Matrix aligned = Align(maps[m].data, method, dims);
    std::copy(aligned.data.begin(), aligned.data.end(), stack.data.channel(m).begin());
    stack.resolutions.push_back(maps[m].resolution);
  }
  return stack;
}

}  // namespace multires
