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

#include "multires/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "multires/error.hpp"
#include "multires/io_util.hpp"
#include "multires/metrics.hpp"
#include "multires/weighting.hpp"

namespace multires {
namespace {

void RequireSplit(const std::string& split) {
  if (split != "train" && split != "dev" && split != "eval") {
    Fail(ErrorCode::kInvalidArgument,
         "unknown split '" + split + "' (expected train, dev or eval)");
  }
}

std::size_t TargetSamples(std::uint32_t sample_rate, double duration_s) {
  return static_cast<std::size_t>(std::llround(duration_s * static_cast<double>(sample_rate)));
}

std::uint64_t SplitSeed(std::uint64_t seed, const std::string& split) {
  std::uint64_t h = seed ^ 0xC3A5C85C97CB3127ULL;
  for (char ch : split) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ULL;
  return h;
}

Waveform LoadUtterance(const AppConfig& c, const ProtocolEntry& e) {
  const Waveform w = ReadWav(c.corpus_dir / e.path);
  if (w.sample_rate != c.sample_rate) {
    Fail(ErrorCode::kFormat, (c.corpus_dir / e.path).string() + ": sample_rate " +
                                 std::to_string(w.sample_rate) +
                                 " does not match data.sample_rate " +
                                 std::to_string(c.sample_rate));
  }
  return w;
}

bool SameResolutions(std::span<const ResolutionSpec> a, std::span<const ResolutionSpec> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

std::filesystem::path CachePath(const AppConfig& c, const std::string& split, bool refined) {
  return (refined ? c.cache_dir / "refined" : c.cache_dir) / (split + ".mrfe");
}

std::filesystem::path CheckpointPath(const AppConfig& c, bool refined) {
  return (refined ? c.checkpoint_dir / "refined" : c.checkpoint_dir) / "model.mrck";
}

FeatureStack ExtractStack(const Waveform& w, std::span<const ResolutionSpec> resolutions,
                          AlignMethod method, std::optional<TargetDims> target,
                          double target_duration_s, CropMode mode, Rng& rng) {
  const Waveform unified = UnifyLength(w, target_duration_s, mode, rng);
  const std::vector<FeatureMap> maps = ExtractAll(unified, resolutions);
  return AlignAndStack(maps, method, target);
}

TargetDims DefaultTargetDims(std::span<const ResolutionSpec> resolutions,
                             std::uint32_t sample_rate, double duration_s) {
  const std::size_t n = TargetSamples(sample_rate, duration_s);
  TargetDims d;
  for (const auto& r : resolutions) {
    d.frames = std::max(d.frames, NumFrames(n, r));
    d.bins = std::max(d.bins, NumBins(r));
  }
  return d;
}

FeatureCache ExtractSplit(const AppConfig& c, const std::string& split,
                          std::span<const ResolutionSpec> resolutions) {
  RequireSplit(split);
  const auto protocol_path = c.corpus_dir / (split + ".txt");
  Require(std::filesystem::exists(protocol_path), ErrorCode::kIo,
          "missing protocol " + protocol_path.string());
  const std::vector<ProtocolEntry> entries = ReadProtocol(protocol_path);
  Require(!entries.empty(), ErrorCode::kInvalidArgument,
          "protocol " + protocol_path.string() + " is empty");

  FeatureCache cache;
  cache.resolutions.assign(resolutions.begin(), resolutions.end());
  cache.dims = c.target.value_or(
      DefaultTargetDims(resolutions, c.sample_rate, c.train.target_duration_s));

  const CropMode mode = split == "train" ? CropMode::kTrainRandom : CropMode::kEvalLeading;
  const std::uint64_t base_seed = SplitSeed(c.train.seed, split);
  std::vector<Tensor3> stacks(entries.size());
  auto work = [&](std::size_t i) {
    Rng rng(base_seed + i);
    stacks[i] = ExtractStack(LoadUtterance(c, entries[i]), resolutions, c.alignment,
                             cache.dims, c.train.target_duration_s, mode, rng)
                    .data;
  };

  const std::size_t workers = std::min<std::size_t>(c.workers, entries.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < entries.size(); i += workers) work(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    cache.Add(entries[i].utt_id, entries[i].label, stacks[i]);
  }
  return cache;
}

void CmdGenData(const AppConfig& c, std::ostream& out) {
  GenerateCorpus(c.corpus, c.corpus_dir);
  out << "seed=" << c.corpus.seed << '\n'
      << "wrote corpus to " << c.corpus_dir.string() << " (train=" << c.corpus.n_train
      << " dev=" << c.corpus.n_dev << " eval=" << c.corpus.n_eval << ")\n";
}

std::vector<ExtractOutcome> CmdExtract(const AppConfig& c, const std::string& split,
                                       std::ostream& out) {
  std::vector<std::string> splits;
  if (split == "all") {
    splits.assign(std::begin(kSplits), std::end(kSplits));
  } else {
    RequireSplit(split);
    splits.push_back(split);
  }
  out << "seed=" << c.train.seed << '\n';
  std::vector<ExtractOutcome> outcomes;
  for (const auto& s : splits) {
    const FeatureCache cache = ExtractSplit(c, s, c.resolutions);
    const std::vector<std::uint8_t> bytes = EncodeFeatureCache(cache);
    ExtractOutcome o{CachePath(c, s), Fnv1a64(bytes), false};
    if (std::filesystem::exists(o.path)) {
      o.reused = ReadFileBytes(o.path) == bytes;
    }
    if (!o.reused) WriteFileBytes(o.path, bytes);
    out << (o.reused ? "reused " : "wrote ") << o.path.string() << " utterances="
        << cache.utterances.size() << " dims=" << cache.resolutions.size() << "x"
        << cache.dims.frames << "x" << cache.dims.bins << " hash=" << std::hex
        << std::setw(16) << std::setfill('0') << o.content_hash << std::dec
        << std::setfill(' ') << '\n';
    outcomes.push_back(o);
  }
  return outcomes;
}

TrainOutcome CmdTrain(const AppConfig& c, std::ostream& out, bool refined) {
  const FeatureCache train = ReadFeatureCache(CachePath(c, "train", refined));
  const FeatureCache dev = ReadFeatureCache(CachePath(c, "dev", refined));
  if (!refined) RequireSameResolutions(c.resolutions, train.resolutions, "training cache");
  RequireSameResolutions(train.resolutions, dev.resolutions, "dev cache");
  Require(train.dims == dev.dims, ErrorCode::kShapeMismatch,
          "train and dev caches have different alignment dims");

  const Model model(ModelSpec{train.resolutions, c.backend});

  // Utterances longer than the target get a fresh random crop every epoch.
  std::map<std::size_t, Waveform> long_utts;
  if (c.train.recrop_each_epoch) {
    const auto entries = ReadProtocol(c.corpus_dir / "train.txt");
    const std::size_t target = TargetSamples(c.sample_rate, c.train.target_duration_s);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < train.utterances.size(); ++i) {
      index[train.utterances[i].utt_id] = i;
    }
    for (const auto& e : entries) {
      const auto it = index.find(e.utt_id);
      if (it == index.end()) continue;
      Waveform w = LoadUtterance(c, e);
      if (w.samples.size() > target) long_utts.emplace(it->second, std::move(w));
    }
  }
  RecropFn recrop;
  if (!long_utts.empty()) {
    recrop = [&](std::size_t idx, Rng& rng) -> std::optional<Tensor3> {
      const auto it = long_utts.find(idx);
      if (it == long_utts.end()) return std::nullopt;
      return ExtractStack(it->second, train.resolutions, c.alignment, train.dims,
                          c.train.target_duration_s, CropMode::kTrainRandom, rng)
          .data;
    };
  }

  out << "seed=" << c.train.seed << '\n'
      << "training on " << train.utterances.size() << " utterances, "
      << train.resolutions.size() << " resolutions, " << model.num_params()
      << " parameters\n";
  TrainOutcome o;
  o.result = Train(model, train, dev, c.train, recrop, &out);
  o.checkpoint = CheckpointPath(c, refined);
  o.log = o.checkpoint.parent_path() / "train.log";
  WriteCheckpoint(Checkpoint{model.spec(), o.result.params}, o.checkpoint);
  WriteFileText(o.log, o.result.log);
  out << "retained epoch " << o.result.best_epoch << " (dev EER " << o.result.best_dev_eer
      << "), checkpoint " << o.checkpoint.string() << '\n';
  return o;
}

EvalReport Evaluate(const Checkpoint& ckpt, const FeatureCache& cache, const TdcfParams& p) {
  RequireSameResolutions(ckpt.spec.resolutions, cache.resolutions, "evaluation cache");
  const Model model(ckpt.spec);
  EvalReport r;
  r.scores = ScoreCache(model, ckpt.params, cache);
  std::sort(r.scores.begin(), r.scores.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) { return a.utt_id < b.utt_id; });
  r.det = DetPoints(r.scores);
  r.eer = EerFromDet(r.det);
  r.min_tdcf = MinTdcfFromDet(r.det, p);
  std::ostringstream s;
  s << std::setprecision(9) << "eer=" << r.eer << " min_tdcf=" << r.min_tdcf;
  r.summary = s.str();
  return r;
}

EvalReport CmdEval(const AppConfig& c, const std::filesystem::path& checkpoint,
                   const std::string& split, std::ostream& out,
                   std::optional<std::filesystem::path> cache_override) {
  RequireSplit(split);
  const Checkpoint ckpt = ReadCheckpoint(checkpoint);
  const bool refined = !SameResolutions(ckpt.spec.resolutions, c.resolutions);
  const auto cache_path = cache_override.value_or(CachePath(c, split, refined));
  const FeatureCache cache = ReadFeatureCache(cache_path);
  EvalReport r = Evaluate(ckpt, cache, c.tdcf);

  const auto dir = checkpoint.has_parent_path() ? checkpoint.parent_path()
                                                : std::filesystem::path(".");
  WriteScores(r.scores, dir / ("scores_" + split + ".txt"));
  WriteFileText(dir / ("det_" + split + ".csv"), DetCsv(r.det));
  WriteFileText(dir / ("summary_" + split + ".txt"), r.summary + "\n");
  out << r.summary << '\n';
  return r;
}

std::vector<double> MeanWeightsOverSet(const Checkpoint& ckpt, const FeatureCache& cache) {
  RequireSameResolutions(ckpt.spec.resolutions, cache.resolutions, "weights cache");
  Require(!cache.utterances.empty(), ErrorCode::kInvalidArgument,
          "cannot average weights over an empty split");
  const Model model(ckpt.spec);
  std::vector<std::vector<double>> per_utt;
  per_utt.reserve(cache.utterances.size());
  for (std::size_t i = 0; i < cache.utterances.size(); ++i) {
    per_utt.push_back(model.ResolutionWeights(ckpt.params, cache.Stack(i)));
  }
  return MeanWeights(per_utt);
}

std::string WeightsReport(std::span<const ResolutionSpec> resolutions,
                          std::span<const double> weights) {
  std::vector<std::size_t> order(resolutions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  std::ostringstream out;
  out << std::setprecision(9);
  for (std::size_t i : order) {
    out << resolutions[i].window_len << '\t' << resolutions[i].hop_len << '\t' << weights[i]
        << '\n';
  }
  return out.str();
}

std::string CmdInspectWeights(const AppConfig& c, const std::filesystem::path& checkpoint,
                              const std::string& split, std::ostream& out) {
  RequireSplit(split);
  const Checkpoint ckpt = ReadCheckpoint(checkpoint);
  const bool refined = !SameResolutions(ckpt.spec.resolutions, c.resolutions);
  const FeatureCache cache = ReadFeatureCache(CachePath(c, split, refined));
  const auto weights = MeanWeightsOverSet(ckpt, cache);
  const std::string report = WeightsReport(ckpt.spec.resolutions, weights);
  out << report;
  return report;
}

PruneOutcome CmdPrune(const AppConfig& c, const std::filesystem::path& checkpoint,
                      std::ostream& out) {
  const Checkpoint ckpt = ReadCheckpoint(checkpoint);
  RequireSameResolutions(c.resolutions, ckpt.spec.resolutions, "checkpoint");
  const FeatureCache weights_cache = ReadFeatureCache(CachePath(c, c.weights_split));
  const auto weights = MeanWeightsOverSet(ckpt, weights_cache);

  PruneOutcome o;
  o.prune = Prune(weights, ckpt.spec.resolutions);
  Require(!o.prune.retained.empty(), ErrorCode::kState, "pruning retained nothing");
  o.report = PruneReport(o.prune);
  const auto report_path = c.checkpoint_dir / "prune_report.txt";
  WriteFileText(report_path, o.report);
  out << "seed=" << c.train.seed << '\n' << o.report;

  for (const char* split : kSplits) {
    const FeatureCache refined = ExtractSplit(c, split, o.prune.retained);
    WriteFeatureCache(refined, CachePath(c, split, true));
  }
  o.refined = CmdTrain(c, out, true);
  out << "prune report " << report_path.string() << '\n';
  return o;
}

}  // namespace multires
