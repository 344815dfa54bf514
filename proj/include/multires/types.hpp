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
#include <string>
#include <vector>

namespace multires {

struct Waveform {
  std::vector<double> samples;
  std::uint32_t sample_rate = 0;

  bool operator==(const Waveform&) const = default;
};

// Throws kInvalidArgument when samples are empty or non-finite, or the
// sample rate is zero.
void ValidateWaveform(const Waveform& w);

// One time-frequency resolution: analysis window length and frame shift,
// both in samples.
struct ResolutionSpec {
  std::uint32_t window_len = 0;
  std::uint32_t hop_len = 0;

  auto operator<=>(const ResolutionSpec&) const = default;
};

void ValidateResolution(const ResolutionSpec& r);

// "window/hop", the notation used by configs and reports.
std::string ToString(const ResolutionSpec& r);
ResolutionSpec ParseResolution(const std::string& text);

enum class Label : std::uint8_t { kSpoof = 0, kBonafide = 1 };

const char* ToString(Label label);
Label ParseLabel(const std::string& token);

}  // namespace multires
