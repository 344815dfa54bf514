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

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multires/stft.hpp"
#include "multires/tensor.hpp"
#include "multires/types.hpp"

namespace multires {

enum class AlignMethod { kAdaptivePool, kNearest };

const char* ToString(AlignMethod m);
AlignMethod ParseAlignMethod(const std::string& s);

// M aligned feature maps; channel m belongs to resolutions[m].
struct FeatureStack {
  Tensor3 data;
  std::vector<ResolutionSpec> resolutions;
};

struct TargetDims {
  std::size_t frames = 0;
  std::size_t bins = 0;

  bool operator==(const TargetDims&) const = default;
};

// Input range [begin, end) averaged into output bin i of `out` bins:
// [floor(i*in/out), ceil((i+1)*in/out)).
std::pair<std::size_t, std::size_t> AdaptiveBin(std::size_t i, std::size_t in,
                                                std::size_t out);

std::vector<double> AdaptiveAvgPool1d(std::span<const double> x, std::size_t out);
// Separable: pools along rows first, then along columns.
Matrix AdaptiveAvgPool(const Matrix& m, std::size_t out_rows, std::size_t out_cols);

// output[i][j] = input[floor(i*in_rows/out_rows)][floor(j*in_cols/out_cols)].
Matrix NearestUpsample(const Matrix& m, std::size_t out_rows, std::size_t out_cols);

Matrix Align(const Matrix& m, AlignMethod method, TargetDims target);

// (max frames, max bins) over the maps.
TargetDims MaxDims(std::span<const FeatureMap> maps);

FeatureStack AlignAndStack(std::span<const FeatureMap> maps, AlignMethod method,
                           std::optional<TargetDims> target = std::nullopt);

}  // namespace multires
