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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "multires/random.hpp"
#include "multires/types.hpp"

namespace multires {

// PCM16 mono RIFF/WAVE. Samples are int16 / 32768 on read; on write they are
// rounded to the nearest int16 step and clamped.
Waveform ReadWav(const std::filesystem::path& path);
Waveform ParseWav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodeWav(const Waveform& w);
void WriteWav(const Waveform& w, const std::filesystem::path& path);

enum class CropMode { kTrainRandom, kEvalLeading };

// Tiles short utterances end to end, crops long ones (random segment in
// training, leading segment otherwise). Output length is
// round(target_s * sample_rate).
Waveform UnifyLength(const Waveform& w, double target_s, CropMode mode, Rng& rng);
// Same, with the target expressed in samples.
Waveform UnifyLengthSamples(const Waveform& w, std::size_t target, CropMode mode,
                            Rng& rng);

struct ProtocolEntry {
  std::string utt_id;
  Label label = Label::kBonafide;
  std::string path;

  bool operator==(const ProtocolEntry&) const = default;
};

std::vector<ProtocolEntry> ParseProtocol(const std::string& text);
std::vector<ProtocolEntry> ReadProtocol(const std::filesystem::path& path);
void WriteProtocol(std::span<const ProtocolEntry> entries,
                   const std::filesystem::path& path);

struct ScoreRecord {
  std::string utt_id;
  Label label = Label::kBonafide;
  double score = 0.0;  // higher = more bona fide

  bool operator==(const ScoreRecord&) const = default;
};

void WriteScores(std::span<const ScoreRecord> records,
                 const std::filesystem::path& path);
std::vector<ScoreRecord> ReadScores(const std::filesystem::path& path);

struct CorpusSpec {
  std::uint32_t n_train = 400;
  std::uint32_t n_dev = 100;
  std::uint32_t n_eval = 200;
  double duration_s = 1.0;
  std::uint32_t sample_rate = 8000;
  ResolutionSpec spoof_synthesis{256, 64};
  std::uint64_t seed = 1234;

  bool operator==(const CorpusSpec&) const = default;
};

void ValidateCorpusSpec(const CorpusSpec& spec);

// Harmonic bona fide utterance: 3-8 harmonics of a fundamental in
// [80, 300] Hz with random amplitudes, an attack-decay envelope and white
// noise at 30 dB SNR.
Waveform SynthesizeBonafide(Rng& rng, std::size_t num_samples,
                            std::uint32_t sample_rate);

// A generated utterance together with the bona fide source it was derived
// from (identical to `wave` for bona fide utterances).
struct SyntheticUtterance {
  Waveform wave;
  Waveform source;
  Label label = Label::kBonafide;
};

// Utterance `index` of a split; pure function of (spec, split, index).
SyntheticUtterance SynthesizeUtterance(const CorpusSpec& spec,
                                       const std::string& split,
                                       std::uint32_t index);

inline constexpr const char* kSplits[] = {"train", "dev", "eval"};

// Writes <out_dir>/<split>.txt protocols and <out_dir>/wav/<utt>.wav.
// Odd utterance indices are spoofed, so every split is balanced.
void GenerateCorpus(const CorpusSpec& spec, const std::filesystem::path& out_dir);

}  // namespace multires
