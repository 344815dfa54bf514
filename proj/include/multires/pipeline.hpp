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

// Command orchestration: gen-data, extract, train, eval, prune and
// inspect-weights. Artifact locations, relative to the configured
// directories:
//
//   <corpus_dir>/{train,dev,eval}.txt, <corpus_dir>/wav/*.wav
//   <cache_dir>/<split>.mrfe            full resolution set
//   <cache_dir>/refined/<split>.mrfe    resolutions kept by prune
//   <checkpoint_dir>/model.mrck, train.log, prune_report.txt
//   <checkpoint_dir>/refined/model.mrck, train.log
//   <checkpoint dir>/scores_<split>.txt, det_<split>.csv, summary_<split>.txt

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "multires/config.hpp"
#include "multires/formats.hpp"
#include "multires/pruning.hpp"
#include "multires/trainer.hpp"

namespace multires {

std::filesystem::path CachePath(const AppConfig& c, const std::string& split,
                                bool refined = false);
std::filesystem::path CheckpointPath(const AppConfig& c, bool refined = false);

// Extraction of one utterance: length unification, one STFT per resolution,
// log magnitude, alignment.
FeatureStack ExtractStack(const Waveform& w, std::span<const ResolutionSpec> resolutions,
                          AlignMethod method, std::optional<TargetDims> target,
                          double target_duration_s, CropMode mode, Rng& rng);

// Frame/bin counts after unification to `duration_s` (the default alignment
// target when none is configured).
TargetDims DefaultTargetDims(std::span<const ResolutionSpec> resolutions,
                             std::uint32_t sample_rate, double duration_s);

FeatureCache ExtractSplit(const AppConfig& c, const std::string& split,
                          std::span<const ResolutionSpec> resolutions);

void CmdGenData(const AppConfig& c, std::ostream& out);

struct ExtractOutcome {
  std::filesystem::path path;
  std::uint64_t content_hash = 0;
  bool reused = false;
};

// split is train, dev, eval or all.
std::vector<ExtractOutcome> CmdExtract(const AppConfig& c, const std::string& split,
                                       std::ostream& out);

struct TrainOutcome {
  TrainResult result;
  std::filesystem::path checkpoint;
  std::filesystem::path log;
};

TrainOutcome CmdTrain(const AppConfig& c, std::ostream& out, bool refined = false);

struct EvalReport {
  double eer = 0.0;
  double min_tdcf = 0.0;
  std::vector<ScoreRecord> scores;  // sorted by utt_id
  std::vector<DetPoint> det;
  std::string summary;  // eer=<x> min_tdcf=<y>
};

EvalReport Evaluate(const Checkpoint& ckpt, const FeatureCache& cache, const TdcfParams& p);

// Writes scores/DET/summary next to the checkpoint. The cache defaults to the
// full or refined cache matching the checkpoint's resolution list.
EvalReport CmdEval(const AppConfig& c, const std::filesystem::path& checkpoint,
                   const std::string& split, std::ostream& out,
                   std::optional<std::filesystem::path> cache_override = std::nullopt);

std::vector<double> MeanWeightsOverSet(const Checkpoint& ckpt, const FeatureCache& cache);

// window<TAB>hop<TAB>mean_weight, sorted by descending weight.
std::string WeightsReport(std::span<const ResolutionSpec> resolutions,
                          std::span<const double> weights);

std::string CmdInspectWeights(const AppConfig& c, const std::filesystem::path& checkpoint,
                              const std::string& split, std::ostream& out);

struct PruneOutcome {
  PruneResult prune;
  std::string report;
  TrainOutcome refined;
};

// Mean weights on the configured split, prune, re-extract the retained
// resolutions and retrain from scratch.
PruneOutcome CmdPrune(const AppConfig& c, const std::filesystem::path& checkpoint,
                      std::ostream& out);

}  // namespace multires
