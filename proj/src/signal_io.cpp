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

#include "multires/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "multires/error.hpp"
#include "multires/io_util.hpp"
#include "multires/stft.hpp"

namespace multires {
namespace {

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool TagIs(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Waveform ParseWav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || !TagIs(b, 0, "RIFF") || !TagIs(b, 8, "WAVE")) {
    Fail(ErrorCode::kFormat, "malformed RIFF header");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = ReadU32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) {
      Fail(ErrorCode::kFormat, "malformed RIFF header: chunk overruns file");
    }
    if (TagIs(b, pos, "fmt ")) {
      if (size < 16) Fail(ErrorCode::kFormat, "malformed RIFF header: short fmt chunk");
      const std::uint16_t format = ReadU16(b, body);
      channels = ReadU16(b, body + 2);
      rate = ReadU32(b, body + 4);
      bits = ReadU16(b, body + 14);
      if (format != 1) {
        Fail(ErrorCode::kFormat,
             "unsupported WAV encoding: audio_format=" + std::to_string(format));
      }
      if (channels != 1) {
        Fail(ErrorCode::kFormat,
             "unsupported WAV encoding: num_channels=" + std::to_string(channels));
      }
      if (bits != 16) {
        Fail(ErrorCode::kFormat,
             "unsupported WAV encoding: bits_per_sample=" + std::to_string(bits));
      }
      if (rate == 0) Fail(ErrorCode::kFormat, "malformed RIFF header: sample_rate=0");
      have_fmt = true;
    } else if (TagIs(b, pos, "data")) {
      if (!have_fmt) Fail(ErrorCode::kFormat, "malformed RIFF header: data before fmt");
      if (size < 2) Fail(ErrorCode::kFormat, "empty data chunk");
      Waveform w{std::vector<double>(size / 2), rate};
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(b, body + 2 * i));
        w.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1U);
  }
  Fail(ErrorCode::kFormat, "malformed RIFF header: missing data chunk");
}

Waveform ReadWav(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return ParseWav(bytes);
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> EncodeWav(const Waveform& w) {
  ValidateWaveform(w);
  ByteWriter out;
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.Tag("RIFF");
  out.U32(36 + data_bytes);
  out.Tag("WAVE");
  out.Tag("fmt ");
  out.U32(16);
  out.U16(1);
  out.U16(1);
  out.U32(w.sample_rate);
  out.U32(w.sample_rate * 2);
  out.U16(2);
  out.U16(16);
  out.Tag("data");
  out.U32(data_bytes);
  for (double s : w.samples) {
    const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    out.U16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return std::move(out).Take();
}

void WriteWav(const Waveform& w, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeWav(w));
}

Waveform UnifyLengthSamples(const Waveform& w, std::size_t target, CropMode mode,
                            Rng& rng) {
  Require(!w.samples.empty(), ErrorCode::kInvalidArgument, "empty waveform");
  Require(target > 0, ErrorCode::kInvalidArgument, "target length must be positive");
  const std::size_t len = w.samples.size();
  Waveform out{std::vector<double>(target), w.sample_rate};
  if (len <= target) {
    for (std::size_t i = 0; i < target; ++i) out.samples[i] = w.samples[i % len];
    return out;
  }
  std::size_t offset = 0;
  if (mode == CropMode::kTrainRandom) offset = rng.below(len - target + 1);
  std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(offset), target,
              out.samples.begin());
  return out;
}

Waveform UnifyLength(const Waveform& w, double target_s, CropMode mode, Rng& rng) {
  Require(target_s > 0.0, ErrorCode::kInvalidArgument, "target duration must be positive");
  const auto target =
      static_cast<std::size_t>(std::llround(target_s * static_cast<double>(w.sample_rate)));
  return UnifyLengthSamples(w, target, mode, rng);
}

std::vector<ProtocolEntry> ParseProtocol(const std::string& text) {
  std::vector<ProtocolEntry> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[2].empty()) {
      Fail(ErrorCode::kFormat, "protocol line " + std::to_string(line_no) +
                                   ": expected utt_id<TAB>label<TAB>path");
    }
    if (fields[0].find_first_of(" \t") != std::string::npos) {
      Fail(ErrorCode::kFormat, "protocol line " + std::to_string(line_no) +
                                   ": utt_id contains whitespace");
    }
    if (!seen.insert(fields[0]).second) {
      Fail(ErrorCode::kFormat, "duplicate utt_id '" + fields[0] + "'");
    }
    entries.push_back({fields[0], ParseLabel(fields[1]), fields[2]});
  }
  return entries;
}

std::vector<ProtocolEntry> ReadProtocol(const std::filesystem::path& path) {
  try {
    return ParseProtocol(ReadFileText(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

void WriteProtocol(std::span<const ProtocolEntry> entries,
                   const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << e.utt_id << '\t' << ToString(e.label) << '\t' << e.path << '\n';
  }
  WriteFileText(path, out.str());
}

void WriteScores(std::span<const ScoreRecord> records,
                 const std::filesystem::path& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& r : records) {
    Require(std::isfinite(r.score), ErrorCode::kNumerical,
            "non-finite score for '" + r.utt_id + "'");
    out << r.utt_id << '\t' << ToString(r.label) << '\t' << r.score << '\n';
  }
  WriteFileText(path, out.str());
}

std::vector<ScoreRecord> ReadScores(const std::filesystem::path& path) {
  std::istringstream in(ReadFileText(path));
  std::vector<ScoreRecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      Fail(ErrorCode::kFormat, path.string() + ": score line " +
                                   std::to_string(line_no) + " malformed");
    }
    if (!seen.insert(fields[0]).second) {
      Fail(ErrorCode::kFormat, "duplicate utt_id '" + fields[0] + "'");
    }
    ScoreRecord r{fields[0], ParseLabel(fields[1]), 0.0};
    std::istringstream num(fields[2]);
    if (!(num >> r.score) || !std::isfinite(r.score)) {
      Fail(ErrorCode::kFormat, path.string() + ": bad score on line " +
                                   std::to_string(line_no));
    }
    records.push_back(std::move(r));
  }
  return records;
}

void ValidateCorpusSpec(const CorpusSpec& spec) {
  Require(spec.n_train > 0 && spec.n_dev > 0 && spec.n_eval > 0, ErrorCode::kConfig,
          "corpus split counts must be positive");
  Require(spec.duration_s > 0.0, ErrorCode::kConfig, "corpus.duration_s must be positive");
  Require(spec.sample_rate > 0, ErrorCode::kConfig, "corpus.sample_rate must be positive");
  ValidateResolution(spec.spoof_synthesis);
}

Waveform SynthesizeBonafide(Rng& rng, std::size_t num_samples,
                            std::uint32_t sample_rate) {
  Require(num_samples > 0, ErrorCode::kInvalidArgument, "num_samples must be positive");
  const double sr = sample_rate;
  const double f0 = rng.uniform(80.0, 300.0);
  const auto harmonics = 3 + static_cast<int>(rng.below(6));
  struct Partial {
    double freq, amp, phase;
  };
  std::vector<Partial> partials;
  for (int k = 1; k <= harmonics; ++k) {
    const double amp = rng.uniform(0.1, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (k * f0 < 0.5 * sr) partials.push_back({k * f0, amp, phase});
  }
  const double duration = static_cast<double>(num_samples) / sr;
  const double attack = rng.uniform(0.02, 0.2) * duration;
  const double decay = rng.uniform(0.2, 1.0) * duration;

  Waveform w{std::vector<double>(num_samples, 0.0), sample_rate};
  double peak = 0.0;
  for (std::size_t i = 0; i < num_samples; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double env = t < attack ? t / attack : std::exp(-(t - attack) / decay);
    double v = 0.0;
    for (const auto& p : partials) {
      v += p.amp * std::sin(2.0 * std::numbers::pi * p.freq * t + p.phase);
    }
    w.samples[i] = env * v;
    peak = std::max(peak, std::abs(w.samples[i]));
  }
  double power = 0.0;
  const double gain = peak > 0.0 ? 0.5 / peak : 0.0;
  for (double& s : w.samples) {
    s *= gain;
    power += s * s;
  }
  const double noise_std =
      std::sqrt(power / static_cast<double>(num_samples)) * std::pow(10.0, -30.0 / 20.0);
  for (double& s : w.samples) {
    s = std::clamp(s + noise_std * rng.normal(), -1.0, 32767.0 / 32768.0);
  }
  return w;
}

SyntheticUtterance SynthesizeUtterance(const CorpusSpec& spec,
                                       const std::string& split,
                                       std::uint32_t index) {
  std::uint64_t split_code = 0;
  for (char c : split) split_code = split_code * 131 + static_cast<unsigned char>(c);
  Rng rng(SplitMix(SplitMix(spec.seed ^ SplitMix(split_code)) + index));
  const auto n = static_cast<std::size_t>(
      std::llround(spec.duration_s * static_cast<double>(spec.sample_rate)));
  SyntheticUtterance u;
  u.source = SynthesizeBonafide(rng, n, spec.sample_rate);
  if (index % 2 == 1) {
    u.label = Label::kSpoof;
    u.wave = ZeroPhaseResynthesis(u.source, spec.spoof_synthesis);
  } else {
    u.label = Label::kBonafide;
    u.wave = u.source;
  }
  return u;
}

void GenerateCorpus(const CorpusSpec& spec, const std::filesystem::path& out_dir) {
  ValidateCorpusSpec(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "wav", ec);
  Require(!ec, ErrorCode::kIo, "cannot create " + (out_dir / "wav").string());
  const std::uint32_t counts[] = {spec.n_train, spec.n_dev, spec.n_eval};
  for (int s = 0; s < 3; ++s) {
    const std::string split = kSplits[s];
    std::vector<ProtocolEntry> entries;
    for (std::uint32_t i = 0; i < counts[s]; ++i) {
      std::ostringstream id;
      id << split << '_' << std::setw(5) << std::setfill('0') << i;
      const SyntheticUtterance u = SynthesizeUtterance(spec, split, i);
      const std::string rel = "wav/" + id.str() + ".wav";
      WriteWav(u.wave, out_dir / rel);
      entries.push_back({id.str(), u.label, rel});
    }
    WriteProtocol(entries, out_dir / (split + ".txt"));
  }
}

}  // namespace multires
