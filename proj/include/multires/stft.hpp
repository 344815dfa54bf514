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

// Multi-resolution short-time Fourier front-end.
//
// Framing convention: the signal is reflect-padded by n_fft/2 on both sides,
// frame t covers padded samples [t*hop, t*hop + window_len), is multiplied by
// a periodic Hann window and zero-padded to n_fft, where n_fft is the next
// power of two >= window_len. Frame count is floor(len/hop) + 1 and only the
// n_fft/2 + 1 non-negative frequency bins are kept.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "multires/tensor.hpp"
#include "multires/types.hpp"

namespace multires {

using Complex = std::complex<double>;

inline constexpr double kLogFloor = 1e-10;

std::size_t NextPowerOfTwo(std::size_t n);
std::size_t FftSize(const ResolutionSpec& r);
std::size_t NumBins(const ResolutionSpec& r);
std::size_t NumFrames(std::size_t num_samples, const ResolutionSpec& r);

// Periodic Hann: w[n] = 0.5 - 0.5 cos(2 pi n / len).
std::vector<double> HannWindow(std::size_t len);

// In-place iterative radix-2 FFT of a fixed power-of-two size.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }
  void Forward(std::span<Complex> data) const;
  // Unnormalized inverse (no 1/n factor).
  void Inverse(std::span<Complex> data) const;

 private:
  void Transform(std::span<Complex> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddles_;
};

struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  Complex operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
};

struct FeatureMap {
  Matrix data;  // frames x bins
  ResolutionSpec resolution;
};

// Sample of the reflect-padded signal at padded position `pos`.
double ReflectPaddedSample(std::span<const double> x, std::ptrdiff_t pos,
                           std::size_t pad);

// The windowed, zero-padded frame t (length n_fft) fed to the DFT.
std::vector<double> WindowedFrame(std::span<const double> x,
                                  const ResolutionSpec& r, std::size_t t,
                                  std::span<const double> window);

ComplexMatrix Stft(const Waveform& w, const ResolutionSpec& r);

// ln(max(|z|, kLogFloor)) elementwise.
FeatureMap LogMagnitude(const ComplexMatrix& spec, const ResolutionSpec& r);

std::vector<FeatureMap> ExtractAll(const Waveform& w,
                                   std::span<const ResolutionSpec> resolutions);

// Magnitude-only, zero-phase resynthesis at resolution r: every frame's
// magnitude spectrum is inverted with zero phase, centred in the window and
// overlap-added with squared-window normalisation. The output keeps the
// input length and RMS.
Waveform ZeroPhaseResynthesis(const Waveform& w, const ResolutionSpec& r);

}  // namespace multires
