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

#include "multires/formats.hpp"

#include <limits>

#include "multires/error.hpp"
#include "multires/io_util.hpp"

namespace multires {
namespace {

std::string Join(std::span<const ResolutionSpec> rs) {
  std::string s;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) s += ",";
    s += ToString(rs[i]);
  }
  return s;
}

void WriteResolutions(ByteWriter& out, std::span<const ResolutionSpec> rs) {
  for (const auto& r : rs) {
    out.U32(r.window_len);
    out.U32(r.hop_len);
  }
}

std::vector<ResolutionSpec> ReadResolutions(ByteReader& in, std::size_t m) {
  std::vector<ResolutionSpec> rs(m);
  for (auto& r : rs) {
    r.window_len = in.U32();
    r.hop_len = in.U32();
    ValidateResolution(r);
  }
  return rs;
}

}  // namespace

Tensor3 FeatureCache::Stack(std::size_t i) const {
  const auto& u = utterances.at(i);
  Tensor3 t(resolutions.size(), dims.frames, dims.bins);
  for (std::size_t k = 0; k < t.data.size(); ++k) t.data[k] = u.stack[k];
  return t;
}

void FeatureCache::Add(std::string utt_id, Label label, const Tensor3& stack) {
  Require(stack.channels == resolutions.size() && stack.rows == dims.frames &&
              stack.cols == dims.bins,
          ErrorCode::kShapeMismatch, "stack shape does not match feature cache header");
  CachedUtterance u{std::move(utt_id), label, std::vector<float>(stack.data.size())};
  for (std::size_t k = 0; k < stack.data.size(); ++k) {
    u.stack[k] = static_cast<float>(stack.data[k]);
  }
  utterances.push_back(std::move(u));
}

std::vector<std::uint8_t> EncodeFeatureCache(const FeatureCache& cache) {
  Require(!cache.resolutions.empty() &&
              cache.resolutions.size() <= std::numeric_limits<std::uint16_t>::max(),
          ErrorCode::kInvalidArgument, "feature cache resolution count out of range");
  ByteWriter out;
  out.Tag("MRFE");
  out.U16(kFeatureCacheVersion);
  out.U16(static_cast<std::uint16_t>(cache.resolutions.size()));
  WriteResolutions(out, cache.resolutions);
  out.U32(static_cast<std::uint32_t>(cache.dims.frames));
  out.U32(static_cast<std::uint32_t>(cache.dims.bins));
  out.U32(static_cast<std::uint32_t>(cache.utterances.size()));
  for (const auto& u : cache.utterances) {
    Require(u.utt_id.size() <= std::numeric_limits<std::uint16_t>::max(),
            ErrorCode::kInvalidArgument, "utt_id too long");
    Require(u.stack.size() == cache.stack_size(), ErrorCode::kShapeMismatch,
            "cached stack for '" + u.utt_id + "' has the wrong size");
    out.U16(static_cast<std::uint16_t>(u.utt_id.size()));
    out.Raw(u.utt_id.data(), u.utt_id.size());
    out.U8(static_cast<std::uint8_t>(u.label));
    out.Raw(u.stack.data(), u.stack.size() * sizeof(float));
  }
  return std::move(out).Take();
}

FeatureCache DecodeFeatureCache(std::span<const std::uint8_t> bytes,
                                const std::string& what) {
  ByteReader in(bytes, what);
  if (!in.Tag("MRFE")) Fail(ErrorCode::kFormat, what + ": bad magic, expected MRFE");
  const std::uint16_t version = in.U16();
  if (version != kFeatureCacheVersion) {
    Fail(ErrorCode::kFormat, what + ": unsupported version " + std::to_string(version));
  }
  FeatureCache cache;
  const std::uint16_t m = in.U16();
  Require(m >= 1, ErrorCode::kFormat, what + ": zero resolutions");
  cache.resolutions = ReadResolutions(in, m);
  cache.dims.frames = in.U32();
  cache.dims.bins = in.U32();
  const std::uint32_t n = in.U32();
  const std::size_t stack = cache.stack_size();
  for (std::uint32_t i = 0; i < n; ++i) {
    CachedUtterance u;
    u.utt_id = in.String(in.U16());
    const std::uint8_t label = in.U8();
    Require(label <= 1, ErrorCode::kFormat, what + ": bad label byte");
    u.label = static_cast<Label>(label);
    u.stack.resize(stack);
    in.Floats(u.stack);
    cache.utterances.push_back(std::move(u));
  }
  Require(in.AtEnd(), ErrorCode::kFormat, what + ": trailing bytes");
  return cache;
}

void WriteFeatureCache(const FeatureCache& cache, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeFeatureCache(cache));
}

FeatureCache ReadFeatureCache(const std::filesystem::path& path) {
  Require(std::filesystem::exists(path), ErrorCode::kIo,
          "missing feature cache " + path.string());
  return DecodeFeatureCache(ReadFileBytes(path), path.string());
}

std::vector<std::uint8_t> EncodeCheckpoint(const Checkpoint& ckpt) {
  const Model model(ckpt.spec);
  Require(ckpt.params.size() == model.num_params(), ErrorCode::kShapeMismatch,
          "checkpoint parameter count does not match its architecture");
  const auto& b = ckpt.spec.backend;
  ByteWriter out;
  out.Tag("MRCK");
  out.U16(kCheckpointVersion);
  out.U32(b.stem_channels);
  out.U32(b.stages);
  out.U32(b.blocks_per_stage);
  out.U32(b.se_reduction);
  out.U32(b.n_classes);
  out.U32(static_cast<std::uint32_t>(ckpt.spec.resolutions.size()));
  WriteResolutions(out, ckpt.spec.resolutions);
  out.U64(ckpt.params.size());
  for (double v : ckpt.params) out.F64(v);
  return std::move(out).Take();
}

Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes, const std::string& what) {
  ByteReader in(bytes, what);
  if (!in.Tag("MRCK")) Fail(ErrorCode::kFormat, what + ": bad magic, expected MRCK");
  const std::uint16_t version = in.U16();
  if (version != kCheckpointVersion) {
    Fail(ErrorCode::kFormat, what + ": unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  auto& b = ckpt.spec.backend;
  b.stem_channels = in.U32();
  b.stages = in.U32();
  b.blocks_per_stage = in.U32();
  b.se_reduction = in.U32();
  b.n_classes = in.U32();
  const std::uint32_t m = in.U32();
  Require(m >= 1 && m <= 4096, ErrorCode::kFormat, what + ": bad resolution count");
  ckpt.spec.resolutions = ReadResolutions(in, m);
  const std::uint64_t count = in.U64();
  const Model model(ckpt.spec);
  Require(count == model.num_params(), ErrorCode::kFormat,
          what + ": parameter count " + std::to_string(count) +
              " does not match architecture (" + std::to_string(model.num_params()) + ")");
  ckpt.params.resize(count);
  for (double& v : ckpt.params) v = in.F64();
  Require(in.AtEnd(), ErrorCode::kFormat, what + ": trailing bytes");
  return ckpt;
}

void WriteCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeCheckpoint(ckpt));
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  Require(std::filesystem::exists(path), ErrorCode::kIo,
          "missing checkpoint " + path.string());
  return DecodeCheckpoint(ReadFileBytes(path), path.string());
}

void RequireSameResolutions(std::span<const ResolutionSpec> expected,
                            std::span<const ResolutionSpec> actual,
                            const std::string& what) {
  const bool same = expected.size() == actual.size() &&
                    std::equal(expected.begin(), expected.end(), actual.begin());
  if (!same) {
    Fail(ErrorCode::kShapeMismatch, what + ": resolutions [" + Join(actual) +
                                        "] do not match expected [" + Join(expected) + "]");
  }
}

}  // namespace multires
