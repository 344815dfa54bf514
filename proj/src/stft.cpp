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

#include "multires/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "multires/error.hpp"

namespace multires {

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t FftSize(const ResolutionSpec& r) {
  return NextPowerOfTwo(r.window_len);
}

std::size_t NumBins(const ResolutionSpec& r) { return FftSize(r) / 2 + 1; }

std::size_t NumFrames(std::size_t num_samples, const ResolutionSpec& r) {
  return num_samples / r.hop_len + 1;
}

std::vector<double> HannWindow(std::size_t len) {
  Require(len >= 1, ErrorCode::kInvalidArgument, "window length must be >= 1");
  std::vector<double> w(len);
  for (std::size_t n = 0; n < len; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(len));
  }
  return w;
}

Fft::Fft(std::size_t n) : n_(n), bitrev_(n), twiddles_(n / 2) {
  Require(n >= 1 && (n & (n - 1)) == 0, ErrorCode::kInvalidArgument,
          "FFT size must be a power of two");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle =
        -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
  }
}

void Fft::Forward(std::span<Complex> data) const { Transform(data, false); }

void Fft::Inverse(std::span<Complex> data) const { Transform(data, true); }

void Fft::Transform(std::span<Complex> data, bool inverse) const {
  Require(data.size() == n_, ErrorCode::kShapeMismatch, "FFT buffer size mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex tw = twiddles_[k * stride];
        if (inverse) tw = std::conj(tw);
        const Complex a = data[start + k];
        const Complex b = data[start + k + half] * tw;
        data[start + k] = a + b;
        data[start + k + half] = a - b;
      }
    }
  }
}

double ReflectPaddedSample(std::span<const double> x, std::ptrdiff_t pos,
                           std::size_t pad) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  if (len == 1) return x[0];
  std::ptrdiff_t i = pos - static_cast<std::ptrdiff_t>(pad);
  const std::ptrdiff_t period = 2 * (len - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= len) i = period - i;
  return x[static_cast<std::size_t>(i)];
}

std::vector<double> WindowedFrame(std::span<const double> x,
                                  const ResolutionSpec& r, std::size_t t,
                                  std::span<const double> window) {
  const std::size_t n_fft = FftSize(r);
  const std::size_t pad = n_fft / 2;
  std::vector<double> frame(n_fft, 0.0);
  const auto start = static_cast<std::ptrdiff_t>(t * r.hop_len);
  for (std::size_t j = 0; j < r.window_len; ++j) {
    frame[j] = window[j] *
               ReflectPaddedSample(x, start + static_cast<std::ptrdiff_t>(j), pad);
  }
  return frame;
}

ComplexMatrix Stft(const Waveform& w, const ResolutionSpec& r) {
  ValidateResolution(r);
  Require(!w.samples.empty(), ErrorCode::kInvalidArgument, "empty waveform");
  const std::size_t n_fft = FftSize(r);
  const std::size_t padded_len = w.samples.size() + n_fft;
  Require(r.window_len <= padded_len, ErrorCode::kInvalidArgument,
          "window_len " + std::to_string(r.window_len) +
              " exceeds padded signal length " + std::to_string(padded_len));

  const std::size_t frames = NumFrames(w.samples.size(), r);
  const std::size_t bins = n_fft / 2 + 1;
  const std::vector<double> window = HannWindow(r.window_len);
  const Fft fft(n_fft);

  ComplexMatrix out{frames, bins, std::vector<Complex>(frames * bins)};
  std::vector<Complex> buf(n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::vector<double> frame = WindowedFrame(w.samples, r, t, window);
    for (std::size_t j = 0; j < n_fft; ++j) buf[j] = Complex(frame[j], 0.0);
    fft.Forward(buf);
    std::copy_n(buf.begin(), bins, out.data.begin() + static_cast<std::ptrdiff_t>(t * bins));
  }
  return out;
}

FeatureMap LogMagnitude(const ComplexMatrix& spec, const ResolutionSpec& r) {
  FeatureMap map{Matrix(spec.rows, spec.cols), r};
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    map.data.data[i] = std::log(std::max(std::abs(spec.data[i]), kLogFloor));
  }
  return map;
}

std::vector<FeatureMap> ExtractAll(const Waveform& w,
                                   std::span<const ResolutionSpec> resolutions) {
  Require(!resolutions.empty(), ErrorCode::kInvalidArgument,
          "resolution list is empty");
  std::vector<FeatureMap> maps;
  maps.reserve(resolutions.size());
  for (const auto& r : resolutions) maps.push_back(LogMagnitude(Stft(w, r), r));
  return maps;
}

Waveform ZeroPhaseResynthesis(const Waveform& w, const ResolutionSpec& r) {
  const ComplexMatrix spec = Stft(w, r);
  const std::size_t n_fft = FftSize(r);
  const std::size_t pad = n_fft / 2;
  const std::size_t len = w.samples.size();
  const std::vector<double> window = HannWindow(r.window_len);
  const Fft fft(n_fft);

  std::vector<double> acc(len + n_fft, 0.0);
  std::vector<double> norm(len + n_fft, 0.0);
  std::vector<Complex> buf(n_fft);
  const std::size_t centre = r.window_len / 2;
  for (std::size_t t = 0; t < spec.rows; ++t) {
    for (std::size_t k = 0; k < spec.cols; ++k) {
      const double mag = std::abs(spec(t, k));
      buf[k] = Complex(mag, 0.0);
      if (k > 0 && k < n_fft - k) buf[n_fft - k] = Complex(mag, 0.0);
    }
    fft.Inverse(buf);
    const std::size_t start = t * r.hop_len;
    for (std::size_t j = 0; j < r.window_len; ++j) {
      const std::size_t src = (j + n_fft - centre % n_fft) % n_fft;
      const double v = buf[src].real() / static_cast<double>(n_fft);
      acc[start + j] += v * window[j];
      norm[start + j] += window[j] * window[j];
    }
  }

  Waveform out{std::vector<double>(len, 0.0), w.sample_rate};
  for (std::size_t i = 0; i < len; ++i) {
    const double n = norm[i + pad];
    out.samples[i] = n > 1e-8 ? acc[i + pad] / n : 0.0;
  }

  auto rms = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
  };
  const double src_rms = rms(w.samples);
  const double out_rms = rms(out.samples);
  if (out_rms > 0.0) {
    const double gain = src_rms / out_rms;
    for (double& v : out.samples) v = std::clamp(v * gain, -1.0, 32767.0 / 32768.0);
  }
  return out;
}

}  // namespace multires
