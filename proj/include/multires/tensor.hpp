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

#include <cstddef>
#include <span>
#include <vector>

namespace multires {

// Row-major dense matrix. For feature maps rows are time frames and
// columns are frequency bins.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  bool operator==(const Matrix&) const = default;
};

// Channel-major C x W x H tensor (channel, time, frequency).
struct Tensor3 {
  std::size_t channels = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t c, std::size_t r, std::size_t w, double fill = 0.0)
      : channels(c), rows(r), cols(w), data(c * r * w, fill) {}

  std::size_t plane() const { return rows * cols; }

  double& operator()(std::size_t c, std::size_t r, std::size_t w) {
    return data[(c * rows + r) * cols + w];
  }
  double operator()(std::size_t c, std::size_t r, std::size_t w) const {
    return data[(c * rows + r) * cols + w];
  }

  std::span<double> channel(std::size_t c) {
    return {data.data() + c * plane(), plane()};
  }
  std::span<const double> channel(std::size_t c) const {
    return {data.data() + c * plane(), plane()};
  }

  bool same_shape(const Tensor3& o) const {
    return channels == o.channels && rows == o.rows && cols == o.cols;
  }

  bool operator==(const Tensor3&) const = default;
};

}  // namespace multires
