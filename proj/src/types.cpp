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

#include "multires/types.hpp"

#include <charconv>
#include <cmath>

#include "multires/error.hpp"

namespace multires {

void ValidateWaveform(const Waveform& w) {
  Require(!w.samples.empty(), ErrorCode::kInvalidArgument, "empty waveform");
  Require(w.sample_rate > 0, ErrorCode::kInvalidArgument,
          "waveform sample_rate must be positive");
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      Fail(ErrorCode::kInvalidArgument,
           "non-finite waveform sample at index " + std::to_string(i));
    }
  }
}

void ValidateResolution(const ResolutionSpec& r) {
  if (r.hop_len == 0 || r.hop_len > r.window_len) {
    Fail(ErrorCode::kInvalidArgument,
         "invalid resolution " + ToString(r) + ": need 0 < hop <= window");
  }
}

std::string ToString(const ResolutionSpec& r) {
  return std::to_string(r.window_len) + "/" + std::to_string(r.hop_len);
}

ResolutionSpec ParseResolution(const std::string& text) {
  const auto slash = text.find('/');
  ResolutionSpec r;
  auto parse = [&](std::string_view part, std::uint32_t& out) {
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, out);
    return ec == std::errc() && ptr == end && !part.empty();
  };
  if (slash == std::string::npos ||
      !parse(std::string_view(text).substr(0, slash), r.window_len) ||
      !parse(std::string_view(text).substr(slash + 1), r.hop_len)) {
    Fail(ErrorCode::kInvalidArgument,
         "malformed resolution '" + text + "', expected window/hop");
  }
  ValidateResolution(r);
  return r;
}

const char* ToString(Label label) {
  return label == Label::kBonafide ? "bonafide" : "spoof";
}

Label ParseLabel(const std::string& token) {
  if (token == "bonafide") return Label::kBonafide;
  if (token == "spoof") return Label::kSpoof;
  Fail(ErrorCode::kFormat, "unknown label token '" + token + "'");
}

}  // namespace multires
