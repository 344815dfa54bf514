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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: multires_acceptance [toy.cfg] [--only N,...]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "multires/config.hpp"
#include "multires/formats.hpp"
#include "multires/io_util.hpp"
#include "multires/metrics.hpp"
#include "multires/model.hpp"
#include "multires/pipeline.hpp"
#include "multires/pruning.hpp"
#include "multires/stft.hpp"
#include "multires/trainer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace multires {
namespace {

using testing::RandomVector;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kStftTol = 1e-9;
constexpr double kStftBudgetS = 30.0;
constexpr double kGradStep = 1e-5;
constexpr double kGradRel = 1e-4;
constexpr double kGradAbs = 1e-7;
constexpr double kGradBudgetS = 60.0;
constexpr double kMetricTol = 1e-12;
constexpr double kAdamTol = 1e-12;
constexpr double kToyEerMax = 0.10;
constexpr double kToyBudgetS = 15.0 * 60.0;
constexpr std::uint32_t kToyMaxEpochs = 20;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void Expect(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------
void StftOracle(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(20260101);
  double worst = 0.0;
  std::size_t frames = 0;
  for (int s = 0; s < 50; ++s) {
    const std::size_t len = 1 + rng.below(4096);
    const auto x = RandomVector(rng, len);
    for (std::uint32_t window : {512u, 1724u}) {
      const ResolutionSpec r{window, window / 4};
      const auto spec = Stft(Waveform{x, 16000}, r);
      o.Expect(spec.rows == len / r.hop_len + 1, "frame count");
      for (std::size_t t = 0; t < spec.rows; ++t) {
        const auto ref = testing::NaiveDft(testing::OracleFrame(x, r.window_len, r.hop_len, t));
        for (std::size_t k = 0; k < spec.cols; ++k) {
          worst = std::max(worst, std::abs(spec(t, k) - ref[k]));
        }
        ++frames;
      }
    }
  }
  const double secs = Seconds(t0);
  o.Expect(worst <= kStftTol, "max |stft - dft| = " + std::to_string(worst));
  o.Expect(secs < kStftBudgetS, "runtime");
  o.detail << "frames=" << frames << " max_abs_err=" << worst << " runtime_s=" << secs;
}

// 2 -------------------------------------------------------------------------
void PoolingOracle(Outcome& o) {
  Rng rng(7);
  std::size_t pairs = 0;
  for (std::size_t in = 1; in <= 12; ++in) {
    for (std::size_t out = 1; out <= 12; ++out) {
      const auto x = RandomVector(rng, in);
      o.Expect(AdaptiveAvgPool1d(x, out) == testing::BrutePool1d(x, out),
               "pool " + std::to_string(in) + "->" + std::to_string(out));
      if (in == out) o.Expect(AdaptiveAvgPool1d(x, out) == x, "identity");
      // rows then columns, each against the 1d brute force
      Matrix m(in, out);
      for (double& v : m.data) v = rng.uniform(-3, 3);
      const Matrix y = AdaptiveAvgPool(m, out, in);
      Matrix rows(out, out);
      for (std::size_t c = 0; c < out; ++c) {
        std::vector<double> col(in);
        for (std::size_t r = 0; r < in; ++r) col[r] = m(r, c);
        const auto p = testing::BrutePool1d(col, out);
        for (std::size_t r = 0; r < out; ++r) rows(r, c) = p[r];
      }
      for (std::size_t r = 0; r < out; ++r) {
        const auto p = testing::BrutePool1d(
            std::vector<double>(rows.row(r).begin(), rows.row(r).end()), in);
        for (std::size_t c = 0; c < in; ++c) o.Expect(y(r, c) == p[c], "2d pool");
      }
      ++pairs;
    }
  }
  o.Expect(AdaptiveAvgPool1d(std::vector<double>{1, 2, 3, 4}, 8) ==
               std::vector<double>{1, 1, 2, 2, 3, 3, 4, 4},
           "upsample example");
  o.detail << "size_pairs=" << pairs;
}

// 3 -------------------------------------------------------------------------
void GradientCheck(Outcome& o) {
  const auto t0 = Clock::now();
  ModelSpec spec;
  spec.resolutions = {{128, 32}, {256, 64}, {512, 128}};
  spec.backend.stem_channels = 4;
  spec.backend.stages = 1;
  spec.backend.blocks_per_stage = 1;
  const Model model(spec);
  Rng rng(31);
  std::vector<double> params(model.num_params());
  for (double& v : params) v = rng.uniform(-0.5, 0.5);
  const Tensor3 x = testing::RandomTensor(rng, 3, 6, 6);
  const std::size_t label = 1;

  ModelCache cache;
  const auto ce = CrossEntropy(model.Forward(params, x, cache), label);
  std::vector<double> grads(params.size(), 0.0);
  model.Backward(params, cache, ce.grad, grads);

  std::size_t bad = 0;
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + kGradStep;
    const double up = CrossEntropy(model.Logits(params, x), label).loss;
    params[i] = keep - kGradStep;
    const double down = CrossEntropy(model.Logits(params, x), label).loss;
    params[i] = keep;
    const double fd = (up - down) / (2 * kGradStep);
    if (!testing::GradClose(grads[i], fd, kGradRel, kGradAbs)) ++bad;
    if (std::abs(fd) > kGradAbs) {
      worst_rel = std::max(worst_rel, std::abs(grads[i] - fd) / std::abs(fd));
    }
  }
  const double secs = Seconds(t0);
  o.Expect(bad == 0, std::to_string(bad) + " parameters outside tolerance");
  o.Expect(secs < kGradBudgetS, "runtime");
  o.detail << "params=" << params.size() << " worst_rel=" << worst_rel << " runtime_s=" << secs;
}

// 4 -------------------------------------------------------------------------
void MetricOracles(Outcome& o) {
  Rng rng(404);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(11);
    std::vector<ScoreRecord> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i].utt_id = std::to_string(i);
      r[i].score = rng.below(3) == 0 ? static_cast<double>(rng.below(4)) : rng.uniform(-2, 2);
      r[i].label = i == 0 ? Label::kBonafide
                   : i == 1 ? Label::kSpoof
                            : (rng.below(2) ? Label::kBonafide : Label::kSpoof);
    }
    const double c1 = rng.uniform(0.1, 5.0), c2 = rng.uniform(0.1, 5.0);
    const double e = Eer(r), m = MinTdcf(r, {c1, c2});
    worst = std::max({worst, std::abs(e - testing::OracleEer(r)),
                      std::abs(m - testing::OracleMinTdcf(r, c1, c2))});
    o.Expect(m <= 1.0, "min t-DCF above 1");
    std::vector<ScoreRecord> sep = r;
    for (auto& x : sep) x.score = (x.label == Label::kBonafide ? 10.0 : -10.0) + rng.uniform();
    o.Expect(Eer(sep) == 0.0 && MinTdcf(sep, {c1, c2}) == 0.0, "perfect separation");
  }
  o.Expect(worst <= kMetricTol, "oracle mismatch " + std::to_string(worst));
  o.detail << "sets=200 max_abs_err=" << worst;
}

// 5 -------------------------------------------------------------------------
std::set<std::size_t> RetainedIndices(const PruneResult& r,
                                      const std::vector<ResolutionSpec>& names) {
  std::set<std::size_t> s;
  for (const auto& x : r.retained) {
    s.insert(static_cast<std::size_t>(std::find(names.begin(), names.end(), x) - names.begin()));
  }
  return s;
}

void PruningOracle(Outcome& o) {
  std::size_t vectors = 0;
  for (std::size_t m = 2; m <= 4; ++m) {
    std::vector<ResolutionSpec> names;
    for (std::uint32_t i = 0; i < m; ++i) names.push_back({64 + i, 16});
    std::vector<std::size_t> idx(m, 0);
    while (true) {
      std::vector<double> w(m);
      for (std::size_t i = 0; i < m; ++i) w[i] = 0.1 * static_cast<double>(idx[i]);
      o.Expect(RetainedIndices(Prune(w, names), names) == testing::OracleRetained(w), "grid");
      // shifted copy on an exactly representable grid
      std::vector<double> d(m), ds(m);
      for (std::size_t i = 0; i < m; ++i) {
        d[i] = static_cast<double>(idx[i]) / 8.0;
        ds[i] = d[i] + 0.375;
      }
      o.Expect(RetainedIndices(Prune(d, names), names) == RetainedIndices(Prune(ds, names), names),
               "shift invariance");
      ++vectors;
      std::size_t k = 0;
      while (k < m && ++idx[k] == 11) idx[k++] = 0;
      if (k == m) break;
    }
  }
  std::vector<ResolutionSpec> five;
  for (std::uint32_t i = 0; i < 5; ++i) five.push_back({100 + i, 10});
  const auto ex = Prune(std::vector<double>{0.05, 0.10, 0.55, 0.60, 0.65}, five);
  o.Expect(ex.retained == std::vector<ResolutionSpec>{five[2], five[3], five[4]},
           "worked example");
  o.detail << "weight_vectors=" << vectors << " example_cut=" << ex.cut_index;
}

// 6 -------------------------------------------------------------------------
void ScheduleAndAdam(Outcome& o) {
  const double peak = 1e-3;
  o.Expect(LrAt(1000, peak, 1000) == peak, "lr(1000)");
  o.Expect(LrAt(250, peak, 1000) == 0.25 * peak, "lr(250)");
  o.Expect(LrAt(4000, peak, 1000) == 0.5 * peak, "lr(4000)");

  OptimizerConfig cfg;  // beta 0.9/0.98, eps 1e-9, decay 1e-9
  cfg.peak_lr = peak;
  Adam adam(1, cfg);
  std::vector<double> x{0.4};
  const double g[3] = {0.2, -0.7, 1.5};
  double p = 0.4, m = 0.0, v = 0.0, worst = 0.0;
  for (int t = 1; t <= 3; ++t) {
    const double e = g[t - 1] + 1e-9 * p;
    m = 0.9 * m + 0.1 * e;
    v = 0.98 * v + 0.02 * e * e;
    const double lr = peak * t / 1000.0;
    p -= lr * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.98, t))) + 1e-9);
    adam.Step(x, std::vector<double>{g[t - 1]});
    worst = std::max(worst, std::abs(x[0] - p));
  }
  o.Expect(worst <= kAdamTol, "adam trace");
  o.detail << "adam_max_abs_err=" << worst;
}

// 7 + 8 ---------------------------------------------------------------------
struct ToyRun {
  double seconds = 0.0;
  double eval_eer = 1.0;
  double eval_tdcf = 1.0;
  double refined_eval_eer = 1.0;
  std::string log, refined_log;
  std::vector<std::uint8_t> ckpt, refined_ckpt;
  std::string prune_report;
  std::uint32_t epochs = 0;
};

ToyRun RunToy(const std::filesystem::path& cfg_path, const std::filesystem::path& root) {
  AppConfig c = LoadConfig(cfg_path);
  c.corpus_dir = root / "corpus";
  c.cache_dir = root / "cache";
  c.checkpoint_dir = root / "checkpoints";
  ValidateConfig(c);
  std::ostringstream sink;
  ToyRun r;
  r.epochs = c.train.epochs;
  const auto t0 = Clock::now();
  CmdGenData(c, sink);
  CmdExtract(c, "all", sink);
  const auto trained = CmdTrain(c, sink);
  const auto ev = CmdEval(c, trained.checkpoint, "eval", sink);
  const auto pruned = CmdPrune(c, trained.checkpoint, sink);
  const auto ev2 = CmdEval(c, pruned.refined.checkpoint, "eval", sink);
  r.seconds = Seconds(t0);
  r.eval_eer = ev.eer;
  r.eval_tdcf = ev.min_tdcf;
  r.refined_eval_eer = ev2.eer;
  r.log = ReadFileText(trained.log);
  r.refined_log = ReadFileText(pruned.refined.log);
  r.ckpt = ReadFileBytes(trained.checkpoint);
  r.refined_ckpt = ReadFileBytes(pruned.refined.checkpoint);
  r.prune_report = pruned.report;
  return r;
}

std::string TopResolution(const std::string& report) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      std::istringstream f(line);
      std::string w, h;
      f >> w >> h;
      return w + "/" + h;
    }
  }
  return "?";
}

}  // namespace
}  // namespace multires

int main(int argc, char** argv) {
  using namespace multires;
  std::filesystem::path cfg = MULTIRES_TOY_CONFIG;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else {
      cfg = a;
    }
  }
  auto want = [&](int n) { return only.empty() || only.count(n) > 0; };

  int failures = 0;
  auto report = [&](int n, const char* name, const std::function<void(Outcome&)>& body) {
    if (!want(n)) return;
    Outcome o;
    try {
      body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << n << "  " << name << "  "
              << o.detail.str() << std::endl;
  };

  report(1, "stft-vs-dft", StftOracle);
  report(2, "adaptive-pooling", PoolingOracle);
  report(3, "end-to-end-gradient", GradientCheck);
  report(4, "metric-oracles", MetricOracles);
  report(5, "pruning-oracle", PruningOracle);
  report(6, "schedule-and-adam", ScheduleAndAdam);

  std::optional<ToyRun> first;
  if (want(7) || want(8)) {
    testing::TempDir a("toy_a");
    report(7, "toy-experiment", [&](Outcome& o) {
      first = RunToy(cfg, a.path());
      o.Expect(first->epochs <= kToyMaxEpochs, "epoch budget");
      o.Expect(first->eval_eer <= kToyEerMax, "eval EER");
      o.Expect(first->seconds <= kToyBudgetS, "wall clock");
      o.Expect(!first->refined_ckpt.empty(), "prune + retrain");
      o.detail << "eval_eer=" << first->eval_eer << " eval_min_tdcf=" << first->eval_tdcf
               << " refined_eval_eer=" << first->refined_eval_eer
               << " wall_clock_s=" << first->seconds
               << " top_weight=" << TopResolution(first->prune_report);
    });
    report(8, "determinism", [&](Outcome& o) {
      if (!first) first = RunToy(cfg, a.path());
      testing::TempDir b("toy_b");
      const ToyRun second = RunToy(cfg, b.path());
      o.Expect(first->log == second.log, "train.log differs");
      o.Expect(first->ckpt == second.ckpt, "model.mrck differs");
      o.Expect(first->refined_log == second.refined_log, "refined train.log differs");
      o.Expect(first->refined_ckpt == second.refined_ckpt, "refined model.mrck differs");
      o.detail << "checkpoint_bytes=" << first->ckpt.size();
    });
  }

  report(9, "format-round-trips", [](Outcome& o) {
    testing::TempDir dir("roundtrip");
    Rng rng(9);
    Waveform w{{}, 16000};
    for (int i = 0; i < 4000; ++i) {
      w.samples.push_back(static_cast<double>(static_cast<int>(rng.below(65536)) - 32768) / 32768.0);
    }
    WriteWav(w, dir.path() / "a.wav");
    o.Expect(ReadWav(dir.path() / "a.wav") == w, "wav");

    FeatureCache fc;
    fc.resolutions = {{128, 32}, {256, 64}, {512, 128}};
    fc.dims = {4, 5};
    for (int i = 0; i < 3; ++i) {
      fc.Add("u" + std::to_string(i), i ? Label::kSpoof : Label::kBonafide,
             testing::RandomTensor(rng, 3, 4, 5, -23, 3));
    }
    WriteFeatureCache(fc, dir.path() / "c.mrfe");
    o.Expect(ReadFeatureCache(dir.path() / "c.mrfe") == fc, "feature cache");
    o.Expect(EncodeFeatureCache(ReadFeatureCache(dir.path() / "c.mrfe")) ==
                 ReadFileBytes(dir.path() / "c.mrfe"),
             "feature cache bytes");

    ModelSpec spec;
    spec.resolutions = fc.resolutions;
    const Checkpoint ck{spec, Model(spec).InitParams(5)};
    WriteCheckpoint(ck, dir.path() / "m.mrck");
    o.Expect(ReadCheckpoint(dir.path() / "m.mrck") == ck, "checkpoint");

    AppConfig c = LoadConfig(MULTIRES_TOY_CONFIG);
    c.train.optimizer.peak_lr = 1.0 / 3.0;
    o.Expect(ParseConfig(SerializeConfig(c)) == c, "config");
    o.Expect(SerializeConfig(ParseConfig(SerializeConfig(c))) == SerializeConfig(c),
             "config text");
    o.detail << "wav, mrfe, mrck, config";
  });

  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria"
            << std::endl;
  return failures ? 1 : 0;
}
