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
#include <string>
#include <vector>

namespace multires {

struct ParamSlot {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
  std::vector<std::size_t> shape;
  std::size_t fan_in = 1;  // for initialisation
  bool is_bias = false;
};

// Flat parameter registry. Every trainable tensor lives at a fixed offset
// of one contiguous vector; registration order is the checkpoint traversal
// order.
class ParamLayout {
 public:
  std::size_t Add(std::string name, std::vector<std::size_t> shape,
                  std::size_t fan_in, bool is_bias);

  const ParamSlot& slot(std::size_t i) const { return slots_[i]; }
  std::span<const ParamSlot> slots() const { return slots_; }
  std::size_t total() const { return total_; }

  template <typename T>
  std::span<T> View(std::span<T> flat, std::size_t i) const {
    return flat.subspan(slots_[i].offset, slots_[i].size);
  }

 private:
  std::vector<ParamSlot> slots_;
  std::size_t total_ = 0;
};

}  // namespace multires
