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

#include "doctest.h"
#include "multires/error.hpp"
#include "multires/backend.hpp"
#include "multires/channel_gate.hpp"
#include "multires/model.hpp"
#include "multires/trainer.hpp"
#include "multires/weighting.hpp"
#include "test_util.hpp"

namespace multires {
namespace {

using testing::GradClose;
using testing::RandomTensor;
using testing::RandomVector;

double Dot(const Tensor3& a, const Tensor3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

// Direct 6-loop convolution, zero padding k/2, output size ceil(d/stride).
Tensor3 OracleConv(const Tensor3& x, const std::vector<double>& k, const std::vector<double>& b,
                   std::size_t out_c, std::size_t ksize, std::size_t stride) {
  const auto pad = static_cast<std::ptrdiff_t>(ksize / 2);
  const std::size_t orows = (x.rows + stride - 1) / stride, ocols = (x.cols + stride - 1) / stride;
  Tensor3 y(out_c, orows, ocols);
  for (std::size_t o = 0; o < out_c; ++o) {
    for (std::size_t r = 0; r < orows; ++r) {
      for (std::size_t c = 0; c < ocols; ++c) {
        double acc = b[o];
        for (std::size_t i = 0; i < x.channels; ++i) {
          for (std::size_t u = 0; u < ksize; ++u) {
            for (std::size_t v = 0; v < ksize; ++v) {
              const auto rr = static_cast<std::ptrdiff_t>(r * stride + u) - pad;
              const auto cc = static_cast<std::ptrdiff_t>(c * stride + v) - pad;
              if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(x.rows) ||
                  cc >= static_cast<std::ptrdiff_t>(x.cols)) {
                continue;
              }
              acc += k[((o * x.channels + i) * ksize + u) * ksize + v] *
                     x(i, static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
            }
          }
        }
        y(o, r, c) = acc;
      }
    }
  }
  return y;
}

// Pool, two dense layers and a sigmoid, written out longhand.
std::vector<double> OracleGate(const Tensor3& x, const GateParams& p) {
  std::vector<double> pooled(x.channels), hidden(p.hidden), s(x.channels);
  for (std::size_t c = 0; c < x.channels; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t w = 0; w < x.cols; ++w) acc += x(c, r, w);
    }
    pooled[c] = acc / static_cast<double>(x.rows * x.cols);
  }
  for (std::size_t h = 0; h < p.hidden; ++h) {
    double acc = p.fc1_bias[h];
    for (std::size_t c = 0; c < x.channels; ++c) acc += p.fc1_weight[h * x.channels + c] * pooled[c];
    hidden[h] = std::max(acc, 0.0);
  }
  for (std::size_t c = 0; c < x.channels; ++c) {
    double acc = p.fc2_bias[c];
    for (std::size_t h = 0; h < p.hidden; ++h) acc += p.fc2_weight[c * p.hidden + h] * hidden[h];
    s[c] = 1.0 / (1.0 + std::exp(-acc));
  }
  return s;
}

struct OwnedGate {
  std::vector<double> w1, b1, w2, b2;
  std::size_t channels, hidden;
  OwnedGate(Rng& rng, std::size_t c, std::size_t h)
      : w1(RandomVector(rng, h * c)), b1(RandomVector(rng, h)), w2(RandomVector(rng, c * h)),
        b2(RandomVector(rng, c)), channels(c), hidden(h) {}
  GateParams View() const { return {channels, hidden, w1, b1, w2, b2}; }
};

TEST_CASE("conv2d matches the direct loop") {
  Rng rng(1);
  for (std::size_t stride : {1, 2}) {
    for (std::size_t k : {1, 3}) {
      const Tensor3 x = RandomTensor(rng, 2, 5, 5);
      const auto kernel = RandomVector(rng, 3 * 2 * k * k);
      const auto bias = RandomVector(rng, 3);
      const Tensor3 y = Conv2dForward(x, kernel, bias, ConvShape{2, 3, k, stride});
      const Tensor3 ref = OracleConv(x, kernel, bias, 3, k, stride);
      REQUIRE(y.same_shape(ref));
      for (std::size_t i = 0; i < y.data.size(); ++i) CHECK(std::abs(y.data[i] - ref.data[i]) < 1e-12);
    }
  }
  const Tensor3 odd = RandomTensor(rng, 3, 7, 4);
  const auto kernel = RandomVector(rng, 2 * 3 * 9);
  const auto bias = RandomVector(rng, 2);
  const Tensor3 y = Conv2d(odd, kernel, bias, 2);
  const Tensor3 ref = OracleConv(odd, kernel, bias, 2, 3, 2);
  REQUIRE(y.same_shape(ref));
  for (std::size_t i = 0; i < y.data.size(); ++i) CHECK(std::abs(y.data[i] - ref.data[i]) < 1e-12);
}

TEST_CASE("conv2d examples") {
  Rng rng(2);
  const Tensor3 x = RandomTensor(rng, 1, 6, 6);
  std::vector<double> identity(9, 0.0);
  identity[4] = 1.0;
  CHECK(Conv2d(x, identity, std::vector<double>{0.0}, 1) == x);

  const Tensor3 c(1, 5, 5, 0.75);
  const Tensor3 y = Conv2d(c, std::vector<double>(9, 1.0), std::vector<double>{0.0}, 1);
  for (std::size_t r = 1; r < 4; ++r) {
    for (std::size_t w = 1; w < 4; ++w) CHECK(y(0, r, w) == doctest::Approx(9 * 0.75).epsilon(1e-15));
  }
}

TEST_CASE("conv2d backward matches finite differences") {
  Rng rng(3);
  for (std::size_t stride : {1, 2}) {
    const ConvShape shape{2, 3, 3, stride};
    Tensor3 x = RandomTensor(rng, 2, 5, 4);
    auto kernel = RandomVector(rng, shape.weight_size());
    auto bias = RandomVector(rng, 3);
    ConvCache cache;
    const Tensor3 y = Conv2dForward(x, kernel, bias, shape, &cache);
    const Tensor3 g = RandomTensor(rng, y.channels, y.rows, y.cols);
    std::vector<double> gk(kernel.size(), 0.0), gb(3, 0.0);
    const Tensor3 gx = Conv2dBackward(g, kernel, shape, cache, gk, gb, true);
    auto loss = [&] { return Dot(Conv2dForward(x, kernel, bias, shape), g); };
    const double h = 1e-5;
    auto fd = [&](double& v) {
      const double keep = v;
      v = keep + h;
      const double up = loss();
      v = keep - h;
      const double down = loss();
      v = keep;
      return (up - down) / (2 * h);
    };
    for (std::size_t i = 0; i < kernel.size(); ++i) CHECK(GradClose(gk[i], fd(kernel[i])));
    for (std::size_t i = 0; i < bias.size(); ++i) CHECK(GradClose(gb[i], fd(bias[i])));
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(GradClose(gx.data[i], fd(x.data[i])));
  }
}

TEST_CASE("se gate matches its compositional form") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const std::size_t c = 1 + rng.below(6), h = 1 + rng.below(3);
    const OwnedGate g(rng, c, h);
    const Tensor3 x = RandomTensor(rng, c, 1 + rng.below(5), 1 + rng.below(5));
    const auto s = OracleGate(x, g.View());
    const Tensor3 y = SeBlock(x, g.View());
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < x.plane(); ++i) {
        CHECK(std::abs(y.channel(ch)[i] - s[ch] * x.channel(ch)[i]) < 1e-12);
      }
    }
    const auto gw = GateWeights(ChannelMeans(x), g.View());
    for (std::size_t ch = 0; ch < c; ++ch) CHECK(std::abs(gw[ch] - s[ch]) < 1e-12);
  }
}

TEST_CASE("zero gate parameters halve every channel") {
  const std::vector<double> w1(2 * 4, 0.0), b1(2, 0.0), w2(4 * 2, 0.0), b2(4, 0.0);
  const GateParams p{4, 2, w1, b1, w2, b2};
  Rng rng(5);
  const Tensor3 x = RandomTensor(rng, 4, 3, 3);
  const Tensor3 y = SeBlock(x, p);
  for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == 0.5 * x.data[i]);
  const std::vector<double> w1s(1, 0.0), b1s(1, 0.0), w2s(1, 0.0), b2s(1, 0.0);
  const Tensor3 c(1, 2, 2, 3.0);
  CHECK(SeBlock(c, GateParams{1, 1, w1s, b1s, w2s, b2s}) == Tensor3(1, 2, 2, 1.5));
  CHECK(Sigmoid(0.0) == 0.5);
  CHECK(Sigmoid(-800.0) >= 0.0);
  CHECK(Sigmoid(800.0) <= 1.0);
}

TEST_CASE("gate backward matches finite differences") {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const std::size_t c = 2 + rng.below(3), h = 1 + rng.below(2);
    OwnedGate g(rng, c, h);
    Tensor3 x = RandomTensor(rng, c, 2 + rng.below(3), 2 + rng.below(3));
    const Tensor3 gy = RandomTensor(rng, x.channels, x.rows, x.cols);
    GateCache cache;
    GateForward(x, g.View(), cache);
    std::vector<double> d1(g.w1.size(), 0.0), db1(h, 0.0), d2(g.w2.size(), 0.0), db2(c, 0.0);
    const Tensor3 gx = GateBackward(x, gy, g.View(), cache, GateGrads{d1, db1, d2, db2});
    auto loss = [&] {
      GateCache c2;
      return Dot(GateForward(x, g.View(), c2), gy);
    };
    const double step = 1e-5;
    auto fd = [&](double& v) {
      const double keep = v;
      v = keep + step;
      const double up = loss();
      v = keep - step;
      const double down = loss();
      v = keep;
      return (up - down) / (2 * step);
    };
    for (std::size_t i = 0; i < g.w1.size(); ++i) CHECK(GradClose(d1[i], fd(g.w1[i])));
    for (std::size_t i = 0; i < h; ++i) CHECK(GradClose(db1[i], fd(g.b1[i])));
    for (std::size_t i = 0; i < g.w2.size(); ++i) CHECK(GradClose(d2[i], fd(g.w2[i])));
    for (std::size_t i = 0; i < c; ++i) CHECK(GradClose(db2[i], fd(g.b2[i])));
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(GradClose(gx.data[i], fd(x.data[i])));
  }
}

TEST_CASE("weighting examples") {
  FeatureStack twos{Tensor3(2, 3, 3), {{128, 32}, {256, 64}}};
  for (std::size_t i = 0; i < 9; ++i) {
    twos.data.channel(0)[i] = 2.0;
    twos.data.channel(1)[i] = 4.0;
  }
  CHECK(GlobalPool(twos) == std::vector<double>{2.0, 4.0});
  CHECK(GlobalPool(FeatureStack{Tensor3(1, 1, 1, -3.5), {{4, 1}}}) == std::vector<double>{-3.5});

  Rng rng(7);
  const FeatureStack r{RandomTensor(rng, 3, 4, 5), {{1, 1}, {2, 1}, {3, 1}}};
  const auto pooled = GlobalPool(r);
  for (std::size_t c = 0; c < 3; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < 20; ++i) s += r.data.channel(c)[i];
    CHECK(std::abs(pooled[c] - s / 20.0) < 1e-12);
  }

  CHECK(PredictorHiddenWidth(3) == 2);
  CHECK(PredictorHiddenWidth(13) == 6);
  auto zeros = WeightPredictorParams::Zeros(3, 2);
  CHECK(PredictWeights(pooled, zeros) == std::vector<double>{0.5, 0.5, 0.5});
  for (double& b : zeros.fc2_bias) b = 10.0;
  for (double s : PredictWeights(pooled, zeros)) CHECK(s == doctest::Approx(0.9999546021).epsilon(1e-9));

  const auto rp = WeightPredictorParams::Random(3, 2, rng);
  // Random init leaves biases at zero; perturb them so every path is exercised.
  auto p = rp;
  for (double& b : p.fc1_bias) b = rng.uniform(-0.5, 0.5);
  for (double& b : p.fc2_bias) b = rng.uniform(-0.5, 0.5);
  const auto s = PredictWeights(pooled, p);
  const auto ref = OracleGate(r.data, p.View());
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(std::abs(s[c] - ref[c]) < 1e-12);
    CHECK(s[c] > 0.0);
    CHECK(s[c] < 1.0);
  }

  CHECK(ScaleStack(r, std::vector<double>{1.0, 1.0, 1.0}).data == r.data);
  const FeatureStack one{Tensor3(1, 2, 2, 2.0), {{4, 1}}};
  CHECK(ScaleStack(one, std::vector<double>{0.5}).data == Tensor3(1, 2, 2, 1.0));

  const std::vector<std::vector<double>> a{{0.2}};
  CHECK(MeanWeights(a) == std::vector<double>{0.2});
  const std::vector<std::vector<double>> b{{0.2}, {0.4}};
  CHECK(MeanWeights(b)[0] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("weighting full-path gradient") {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 1 + rng.below(4);
    const std::size_t h = PredictorHiddenWidth(m);
    auto p = WeightPredictorParams::Random(m, h, rng);
    for (double& b : p.fc1_bias) b = rng.uniform(-0.5, 0.5);
    for (double& b : p.fc2_bias) b = rng.uniform(-0.5, 0.5);
    std::vector<ResolutionSpec> rs;
    for (std::uint32_t i = 0; i < m; ++i) rs.push_back({i + 1, 1});
    FeatureStack stack{RandomTensor(rng, m, 1 + rng.below(5), 1 + rng.below(5)), rs};

    const auto fwd = WeightingForward(stack, p);
    const Tensor3 ones(m, stack.data.rows, stack.data.cols, 1.0);  // sum loss
    WeightPredictorGrads grads(p);
    const Tensor3 gx = WeightingBackward(stack, ones, p, fwd.cache, grads);
    auto loss = [&] {
      double s = 0.0;
      for (double v : WeightingForward(stack, p).scaled.data.data) s += v;
      return s;
    };
    const double step = 1e-5;
    auto fd = [&](double& v) {
      const double keep = v;
      v = keep + step;
      const double up = loss();
      v = keep - step;
      const double down = loss();
      v = keep;
      return (up - down) / (2 * step);
    };
    for (std::size_t i = 0; i < p.fc1_weight.size(); ++i) CHECK(GradClose(grads.fc1_weight[i], fd(p.fc1_weight[i])));
    for (std::size_t i = 0; i < p.fc1_bias.size(); ++i) CHECK(GradClose(grads.fc1_bias[i], fd(p.fc1_bias[i])));
    for (std::size_t i = 0; i < p.fc2_weight.size(); ++i) CHECK(GradClose(grads.fc2_weight[i], fd(p.fc2_weight[i])));
    for (std::size_t i = 0; i < p.fc2_bias.size(); ++i) CHECK(GradClose(grads.fc2_bias[i], fd(p.fc2_bias[i])));
    for (std::size_t i = 0; i < stack.data.data.size(); ++i) CHECK(GradClose(gx.data[i], fd(stack.data.data[i])));

    WeightPredictorGrads zero(p);
    WeightingBackward(stack, Tensor3(m, stack.data.rows, stack.data.cols), p, fwd.cache, zero);
    for (double v : zero.fc1_weight) CHECK(v == 0.0);
    for (double v : zero.fc2_bias) CHECK(v == 0.0);
  }
}

TEST_CASE("residual block with zero parameters is relu of its input") {
  const BlockSpec spec{3, 3, 1, 1};
  const std::vector<double> k(3 * 3 * 9, 0.0), b(3, 0.0), s1(3, 0.0), s1b(1, 0.0), s2(3, 0.0);
  const BlockParams p{k, b, k, b, s1, s1b, s2, b, {}, {}};
  Rng rng(9);
  const Tensor3 x = RandomTensor(rng, 3, 4, 4);
  BlockCache cache;
  const Tensor3 y = ResidualBlockForward(x, spec, p, cache);
  for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == std::max(x.data[i], 0.0));
}

ModelSpec SmallSpec(std::size_t m, std::uint32_t stages, std::uint32_t blocks, std::uint32_t stem) {
  ModelSpec spec;
  for (std::uint32_t i = 0; i < m; ++i) spec.resolutions.push_back({64u << i, 16u << i});
  spec.backend.stem_channels = stem;
  spec.backend.stages = stages;
  spec.backend.blocks_per_stage = blocks;
  spec.backend.se_reduction = 4;
  return spec;
}

TEST_CASE("model basics") {
  const Model model(SmallSpec(3, 2, 1, 4));
  CHECK(model.num_blocks() == 2);
  CHECK(model.block_spec(1).stride == 2);
  CHECK(model.block_spec(1).out_channels == 8);
  CHECK(model.block_spec(1).has_projection());
  CHECK_FALSE(model.block_spec(0).has_projection());

  Rng rng(10);
  const Tensor3 x = RandomTensor(rng, 3, 6, 6);
  const std::vector<double> zeros(model.num_params(), 0.0);
  CHECK(model.Logits(zeros, x) == std::vector<double>{0.0, 0.0});

  const auto params = model.InitParams(5);
  CHECK(params == model.InitParams(5));
  CHECK(params != model.InitParams(6));
  for (const auto& slot : model.layout().slots()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(slot.fan_in));
    for (std::size_t i = 0; i < slot.size; ++i) {
      const double v = params[slot.offset + i];
      if (slot.is_bias) {
        CHECK(v == 0.0);
      } else {
        CHECK(std::abs(v) <= bound);
      }
    }
  }
  const auto l1 = model.Logits(params, x);
  CHECK(l1 == model.Logits(params, x));

  ModelCache cache;
  model.Forward(params, x, cache);
  std::vector<double> grads(model.num_params(), 0.0);
  model.Backward(params, cache, std::vector<double>{0.0, 0.0}, grads);
  for (double g : grads) CHECK(g == 0.0);

  CHECK_THROWS_AS(model.Logits(params, RandomTensor(rng, 2, 6, 6)), Error);
}

TEST_CASE("model gradient with two stages") {
  const Model model(SmallSpec(2, 2, 1, 4));
  Rng rng(12);
  auto params = model.InitParams(3);
  for (double& v : params) {
    if (v == 0.0) v = rng.uniform(-0.1, 0.1);
  }
  Tensor3 x = RandomTensor(rng, 2, 5, 5);
  ModelCache cache;
  const auto logits = model.Forward(params, x, cache);
  const auto lg = CrossEntropy(logits, 1);
  std::vector<double> grads(params.size(), 0.0);
  Tensor3 gx;
  model.Backward(params, cache, lg.grad, grads, &gx);
  auto loss = [&] { return CrossEntropy(model.Logits(params, x), 1).loss; };
  const double step = 1e-5;
  auto fd = [&](double& v) {
    const double keep = v;
    v = keep + step;
    const double up = loss();
    v = keep - step;
    const double down = loss();
    v = keep;
    return (up - down) / (2 * step);
  };
  std::size_t bad = 0;
  for (std::size_t i = 0; i < params.size(); ++i) bad += !GradClose(grads[i], fd(params[i]));
  CHECK(bad == 0);
  for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(GradClose(gx.data[i], fd(x.data[i])));
}

TEST_CASE("backend config validation") {
  BackendConfig c;
  CHECK_NOTHROW(ValidateBackendConfig(c));
  c.se_reduction = 32;
  CHECK_THROWS_AS(ValidateBackendConfig(c), Error);
  c = BackendConfig{};
  c.stages = 0;
  CHECK_THROWS_AS(ValidateBackendConfig(c), Error);
  c = BackendConfig{};
  c.n_classes = 3;
  CHECK_THROWS_AS(ValidateBackendConfig(c), Error);
}

}  // namespace
}  // namespace multires
