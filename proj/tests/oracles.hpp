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

// Independent reference implementations used by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "multires/signal_io.hpp"

namespace multires::testing {

// Mirror index into [0, len) without repeating edge samples.
inline double Mirror(const std::vector<double>& x, std::ptrdiff_t i) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  while (i < 0 || i >= len) {
    if (i < 0) i = -i;
    if (i >= len) i = 2 * (len - 1) - i;
  }
  return x[static_cast<std::size_t>(i)];
}

inline std::vector<double> OracleFrame(const std::vector<double>& x, std::size_t window,
                                std::size_t hop, std::size_t t) {
  std::size_t n_fft = 1;
  while (n_fft < window) n_fft *= 2;
  std::vector<double> frame(n_fft, 0.0);
  for (std::size_t j = 0; j < window; ++j) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                          static_cast<double>(window));
    frame[j] = w * Mirror(x, static_cast<std::ptrdiff_t>(t * hop + j) -
                                 static_cast<std::ptrdiff_t>(n_fft / 2));
  }
  return frame;
}

// Bin [start, end) found by search: start is the largest k with k*out <= i*in,
// end the smallest k with k*out >= (i+1)*in.
inline std::pair<std::size_t, std::size_t> SearchBin(std::size_t i, std::size_t in, std::size_t out) {
  std::size_t start = 0;
  while ((start + 1) * out <= i * in) ++start;
  std::size_t end = 0;
  while (end * out < (i + 1) * in) ++end;
  return {start, end};
}

inline std::vector<double> BrutePool1d(const std::vector<double>& x, std::size_t out) {
  std::vector<double> y(out);
  for (std::size_t i = 0; i < out; ++i) {
    const auto [s, e] = SearchBin(i, x.size(), out);
    double acc = 0.0;
    for (std::size_t k = s; k < e; ++k) acc += x[k];
    y[i] = acc / static_cast<double>(e - s);
  }
  return y;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counted {
  double p_miss, p_fa;
};

inline Counted CountAt(const std::vector<ScoreRecord>& r, double tau) {
  double bona = 0, spoof = 0, miss = 0, fa = 0;
  for (const auto& x : r) {
    if (x.label == Label::kBonafide) {
      ++bona;
      if (x.score < tau) ++miss;
    } else {
      ++spoof;
      if (x.score >= tau) ++fa;
    }
  }
  return {miss / bona, fa / spoof};
}

inline std::vector<double> OracleThresholds(const std::vector<ScoreRecord>& r) {
  std::vector<double> t{-kInf, kInf};
  for (const auto& x : r) {
    if (std::find(t.begin(), t.end(), x.score) == t.end()) t.push_back(x.score);
  }
  std::sort(t.begin(), t.end());
  return t;
}

inline double OracleEer(const std::vector<ScoreRecord>& r) {
  const auto t = OracleThresholds(r);
  Counted prev = CountAt(r, t[0]);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const Counted cur = CountAt(r, t[i]);
    if (cur.p_miss == cur.p_fa) return cur.p_miss;
    if (cur.p_miss > cur.p_fa) {
      // intersect the segment with the diagonal
      const double d0 = prev.p_fa - prev.p_miss;
      const double d1 = cur.p_fa - cur.p_miss;
      const double a = d0 / (d0 - d1);
      return prev.p_miss + a * (cur.p_miss - prev.p_miss);
    }
    prev = cur;
  }
  return 1.0;
}

// Any real threshold: scores, midpoints and far-out values.
inline double OracleMinTdcf(const std::vector<ScoreRecord>& r, double c1, double c2) {
  std::vector<double> t{-kInf, kInf, -1e300, 1e300};
  for (const auto& a : r) {
    t.push_back(a.score);
    for (const auto& b : r) t.push_back(0.5 * (a.score + b.score));
  }
  double best = kInf;
  for (double tau : t) {
    const auto c = CountAt(r, tau);
    best = std::min(best, (c1 * c.p_miss + c2 * c.p_fa) / std::min(c1, c2));
  }
  return best;
}

// Searches every subset for the upper set (in (weight, index) order) with the
// widest separation from the rest; ties go to the larger retained set.
inline std::set<std::size_t> OracleRetained(const std::vector<double>& w) {
  const std::size_t m = w.size();
  auto above = [&](std::size_t a, std::size_t b) {
    return w[a] > w[b] || (w[a] == w[b] && a > b);
  };
  double best_gap = -1.0;
  std::set<std::size_t> best;
  for (std::uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
    std::set<std::size_t> in, out;
    for (std::size_t i = 0; i < m; ++i) (mask >> i & 1 ? in : out).insert(i);
    bool upper = true;
    for (auto a : in) {
      for (auto b : out) upper = upper && above(a, b);
    }
    if (!upper) continue;
    double lo = 1e300, hi = -1e300;
    for (auto a : in) lo = std::min(lo, w[a]);
    for (auto b : out) hi = std::max(hi, w[b]);
    const double gap = lo - hi;
    if (gap > best_gap || (gap == best_gap && in.size() > best.size())) {
      best_gap = gap;
      best = in;
    }
  }
  return best;
}

}  // namespace multires::testing
