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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "multires/error.hpp"
#include "multires/config.hpp"
#include "multires/stft.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace multires {
namespace {

using namespace testing;

TEST_CASE("hann window") {
  CHECK(HannWindow(1) == std::vector<double>{0.0});
  const auto w = HannWindow(4);
  REQUIRE(w.size() == 4);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[3] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("framing arithmetic") {
  CHECK(NumFrames(72000, {512, 128}) == 563);
  CHECK(NumBins({512, 128}) == 257);
  CHECK(FftSize({1724, 100}) == 2048);
  CHECK(NumBins({1724, 431}) == 1025);
  CHECK(NextPowerOfTwo(1) == 1);
  CHECK(NextPowerOfTwo(513) == 1024);
}

TEST_CASE("fft matches naive dft and inverts") {
  Rng rng(4);
  for (std::size_t n : {1, 2, 4, 8, 64, 256}) {
    const auto x = testing::RandomVector(rng, n);
    std::vector<Complex> buf(x.begin(), x.end());
    Fft fft(n);
    fft.Forward(buf);
    const auto ref = testing::NaiveDft(x);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(buf[k] - ref[k]) < 1e-12);
    fft.Inverse(buf);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(buf[k] / static_cast<double>(n) - x[k]) < 1e-13);
    }
  }
}

TEST_CASE("parseval") {
  Rng rng(8);
  const auto x = testing::RandomVector(rng, 512);
  std::vector<Complex> buf(x.begin(), x.end());
  Fft(512).Forward(buf);
  double time = 0.0, freq = 0.0;
  for (double v : x) time += v * v;
  for (auto z : buf) freq += std::norm(z);
  CHECK(freq / 512.0 == doctest::Approx(time).epsilon(1e-12));
}

TEST_CASE("stft frames match an independent framing + dft") {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t len = 2 + rng.below(1500);
    const auto x = testing::RandomVector(rng, len);
    const ResolutionSpec r{static_cast<std::uint32_t>(64 + rng.below(200)),
                           static_cast<std::uint32_t>(16 + rng.below(48))};
    const auto spec = Stft(Waveform{x, 8000}, r);
    REQUIRE(spec.rows == len / r.hop_len + 1);
    REQUIRE(spec.cols == NumBins(r));
    for (std::size_t t = 0; t < spec.rows; ++t) {
      const auto ref = testing::NaiveDft(OracleFrame(x, r.window_len, r.hop_len, t));
      for (std::size_t k = 0; k < spec.cols; ++k) {
        REQUIRE(std::abs(spec(t, k) - ref[k]) < 1e-9);
      }
    }
  }
}

TEST_CASE("bin-centred cosine peaks at its bin") {
  const ResolutionSpec r{256, 64};
  const std::size_t k = 19;
  Waveform w{std::vector<double>(4000), 8000};
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k * i) / 256.0);
  }
  const auto spec = Stft(w, r);
  for (std::size_t t = 4; t + 4 < spec.rows; ++t) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < spec.cols; ++b) {
      if (std::abs(spec(t, b)) > std::abs(spec(t, best))) best = b;
    }
    CHECK(best == k);
  }
}

TEST_CASE("log magnitude") {
  ComplexMatrix m{1, 3, {Complex(1, 0), Complex(0, 0), Complex(std::numbers::e, 0)}};
  const auto f = LogMagnitude(m, {4, 1});
  CHECK(f.data(0, 0) == 0.0);
  CHECK(f.data(0, 1) == doctest::Approx(std::log(1e-10)).epsilon(1e-15));
  CHECK(f.data(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("extract_all over the default grid") {
  Rng rng(1);
  const Waveform w{testing::RandomVector(rng, 16000 / 4), 16000};
  const auto rs = DefaultResolutions();
  REQUIRE(rs.size() == 13);
  const auto maps = ExtractAll(w, rs);
  REQUIRE(maps.size() == 13);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::size_t expected = rs[i].window_len <= 512 ? 257 : rs[i].window_len <= 1024 ? 513 : 1025;
    CHECK(maps[i].data.cols == expected);
    CHECK(maps[i].data.rows == w.samples.size() / rs[i].hop_len + 1);
  }
  const auto single = ExtractAll(w, std::vector<ResolutionSpec>{rs[3]});
  CHECK(single[0].data == LogMagnitude(Stft(w, rs[3]), rs[3]).data);
  CHECK(ExtractAll(w, rs)[7].data == maps[7].data);
}

TEST_CASE("per-frame energy and frame-count monotonicity") {
  Rng rng(13);
  const auto x = testing::RandomVector(rng, 3000);
  const ResolutionSpec r{400, 100};
  const auto spec = Stft(Waveform{x, 16000}, r);
  const std::size_t n_fft = FftSize(r);
  const auto window = HannWindow(r.window_len);
  for (std::size_t t = 0; t < spec.rows; ++t) {
    const auto frame = WindowedFrame(x, r, t, window);
    double e_time = 0.0;
    for (double v : frame) e_time += v * v;
    // unfold the half spectrum
    double e_freq = std::norm(spec(t, 0)) + std::norm(spec(t, n_fft / 2));
    for (std::size_t k = 1; k < n_fft / 2; ++k) e_freq += 2.0 * std::norm(spec(t, k));
    CHECK(std::abs(e_freq - n_fft * e_time) <= 1e-6 * n_fft * e_time);
  }
  std::size_t prev = SIZE_MAX;
  for (std::uint32_t hop = 1; hop <= 400; ++hop) {
    const std::size_t w = NumFrames(3000, {400, hop});
    CHECK(w <= prev);
    prev = w;
  }
  Waveform silence{std::vector<double>(1000, 0.0), 8000};
  for (const auto& m : ExtractAll(silence, std::vector<ResolutionSpec>{{128, 32}, {400, 160}})) {
    for (double v : m.data.data) CHECK(v >= std::log(kLogFloor));
  }
}

}  // namespace
}  // namespace multires
