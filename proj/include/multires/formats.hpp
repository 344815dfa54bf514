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

// Binary on-disk formats. All integers and floats are little-endian.
//
// Feature cache (.mrfe), one file per split:
//   "MRFE"  u16 version  u16 M  M x (u32 window, u32 hop)
//   u32 W_out  u32 H_out  u32 N_utt
//   N_utt x (u16 id_len, id bytes (UTF-8), u8 label (0 spoof, 1 bonafide),
//            M*W_out*H_out f32 aligned stack, channel-major)
//
// Checkpoint (.mrck):
//   "MRCK"  u16 version
//   u32 stem_channels  u32 stages  u32 blocks_per_stage  u32 se_reduction
//   u32 n_classes  u32 M  M x (u32 window, u32 hop)
//   u64 param_count  param_count x f64
// Parameters follow the Model's registration order: weight predictor
// (fc1.weight, fc1.bias, fc2.weight, fc2.bias), stem, then each block
// (conv1, conv2, se.fc1, se.fc2, optional 1x1 projection; weight before
// bias), then the classification head.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "multires/alignment.hpp"
#include "multires/model.hpp"
#include "multires/types.hpp"

namespace multires {

inline constexpr std::uint16_t kFeatureCacheVersion = 1;
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct CachedUtterance {
  std::string utt_id;
  Label label = Label::kBonafide;
  std::vector<float> stack;  // M x W_out x H_out

  bool operator==(const CachedUtterance&) const = default;
};

struct FeatureCache {
  std::vector<ResolutionSpec> resolutions;
  TargetDims dims;
  std::vector<CachedUtterance> utterances;

  std::size_t stack_size() const { return resolutions.size() * dims.frames * dims.bins; }
  Tensor3 Stack(std::size_t i) const;
  // Appends a stack, rounding to float32.
  void Add(std::string utt_id, Label label, const Tensor3& stack);

  bool operator==(const FeatureCache&) const = default;
};

std::vector<std::uint8_t> EncodeFeatureCache(const FeatureCache& cache);
FeatureCache DecodeFeatureCache(std::span<const std::uint8_t> bytes,
                                const std::string& what = "feature cache");
void WriteFeatureCache(const FeatureCache& cache, const std::filesystem::path& path);
FeatureCache ReadFeatureCache(const std::filesystem::path& path);

struct Checkpoint {
  ModelSpec spec;
  std::vector<double> params;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> EncodeCheckpoint(const Checkpoint& ckpt);
Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes,
                            const std::string& what = "checkpoint");
void WriteCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

// Throws kShapeMismatch naming both resolution lists when they differ.
void RequireSameResolutions(std::span<const ResolutionSpec> expected,
                            std::span<const ResolutionSpec> actual,
                            const std::string& what);

}  // namespace multires
