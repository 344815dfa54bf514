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

// Application configuration: flat key=value lines with dotted section
// prefixes, '#' comments. Unknown and repeated keys are rejected.
//
//   data.sample_rate          16000
//   data.target_duration_s    4.5
//   corpus.n_train / n_dev / n_eval, corpus.duration_s,
//   corpus.spoof_window, corpus.spoof_hop, corpus.seed
//   features.resolutions      comma list of window/hop
//   features.alignment        adaptive_pool | nearest
//   features.target_frames    0 = max over resolutions
//   features.target_bins      0 = max over resolutions
//   features.workers
//   train.epochs, train.batch_size, train.seed, train.peak_lr,
//   train.warmup_steps, train.recrop_each_epoch, train.threads
//   backend.stem_channels, backend.stages, backend.blocks_per_stage,
//   backend.se_reduction
//   tdcf.c1, tdcf.c2
//   weights.split             split used for mean resolution weights
//   paths.corpus_dir, paths.cache_dir, paths.checkpoint_dir

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "multires/alignment.hpp"
#include "multires/backend.hpp"
#include "multires/metrics.hpp"
#include "multires/signal_io.hpp"
#include "multires/trainer.hpp"

namespace multires {

// The 13 hand-selected window/hop pairs used as the default resolution set.
std::vector<ResolutionSpec> DefaultResolutions();

struct AppConfig {
  std::uint32_t sample_rate = 16000;
  CorpusSpec corpus{.sample_rate = 16000};  // sample_rate mirrors data.sample_rate
  std::vector<ResolutionSpec> resolutions = DefaultResolutions();
  AlignMethod alignment = AlignMethod::kAdaptivePool;
  std::optional<TargetDims> target;
  std::uint32_t workers = 1;
  TrainConfig train;
  BackendConfig backend;
  TdcfParams tdcf;
  std::string weights_split = "dev";
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path checkpoint_dir = "checkpoints";

  bool operator==(const AppConfig&) const = default;
};

// Applies one key=value assignment; throws kConfig naming the key on
// unknown keys or bad values.
void SetConfigValue(AppConfig& config, const std::string& key, const std::string& value);

AppConfig ParseConfig(const std::string& text);
AppConfig LoadConfig(const std::filesystem::path& path);
// Every key, in a fixed order; ParseConfig(SerializeConfig(c)) == c.
std::string SerializeConfig(const AppConfig& config);

void ValidateConfig(const AppConfig& config);

// Sets both the corpus and the training seed.
void OverrideSeed(AppConfig& config, std::uint64_t seed);

}  // namespace multires
