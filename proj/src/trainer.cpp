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

#include "multires/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "multires/error.hpp"
#include "multires/metrics.hpp"

namespace multires {

double LrAt(std::uint64_t step, double peak_lr, std::uint32_t warmup_steps) {
  Require(step >= 1, ErrorCode::kInvalidArgument, "learning-rate step must be >= 1");
  Require(warmup_steps >= 1, ErrorCode::kInvalidArgument, "warmup_steps must be >= 1");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup_steps);
  return peak_lr * std::min(s / w, std::sqrt(w / s));
}

LossAndGrad CrossEntropy(std::span<const double> logits, std::size_t label) {
  Require(label < logits.size(), ErrorCode::kInvalidArgument, "label out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  const double lse = mx + std::log(z);
  LossAndGrad out{lse - logits[label], std::vector<double>(logits.size())};
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.grad[k] = std::exp(logits[k] - lse) - (k == label ? 1.0 : 0.0);
  }
  return out;
}

Adam::Adam(std::size_t num_params, OptimizerConfig config)
    : config_(config), m_(num_params, 0.0), v_(num_params, 0.0) {}

void Adam::Step(std::span<double> params, std::span<const double> grads) {
  Require(params.size() == m_.size() && grads.size() == m_.size(),
          ErrorCode::kShapeMismatch, "optimizer state does not match parameter count");
  ++step_;
  last_lr_ = LrAt(step_, config_.peak_lr, config_.warmup_steps);
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i] + config_.weight_decay * params[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= last_lr_ * m_hat / (std::sqrt(v_hat) + config_.eps);
  }
}

void ValidateTrainConfig(const TrainConfig& c) {
  Require(c.epochs >= 1, ErrorCode::kConfig, "train.epochs must be >= 1");
  Require(c.batch_size >= 1, ErrorCode::kConfig, "train.batch_size must be >= 1");
  Require(c.threads >= 1, ErrorCode::kConfig, "train.threads must be >= 1");
  Require(c.target_duration_s > 0.0, ErrorCode::kConfig,
          "train.target_duration_s must be positive");
  Require(c.optimizer.peak_lr > 0.0, ErrorCode::kConfig, "train.peak_lr must be positive");
  Require(c.optimizer.warmup_steps >= 1, ErrorCode::kConfig,
          "train.warmup_steps must be >= 1");
}

std::vector<ScoreRecord> ScoreCache(const Model& model, std::span<const double> params,
                                    const FeatureCache& cache) {
  RequireSameResolutions(model.spec().resolutions, cache.resolutions, "feature cache");
  std::vector<ScoreRecord> scores;
  scores.reserve(cache.utterances.size());
  ModelCache mc;
  for (std::size_t i = 0; i < cache.utterances.size(); ++i) {
    const auto logits = model.Forward(params, cache.Stack(i), mc);
    scores.push_back({cache.utterances[i].utt_id, cache.utterances[i].label,
                      logits[1] - logits[0]});
  }
  return scores;
}

TrainResult Train(const Model& model, const FeatureCache& train, const FeatureCache& dev,
                  const TrainConfig& config, const RecropFn& recrop,
                  std::ostream* progress) {
  ValidateTrainConfig(config);
  Require(!train.utterances.empty(), ErrorCode::kInvalidArgument, "training cache is empty");
  Require(!dev.utterances.empty(), ErrorCode::kInvalidArgument, "dev cache is empty");
  RequireSameResolutions(model.spec().resolutions, train.resolutions, "training cache");
  RequireSameResolutions(model.spec().resolutions, dev.resolutions, "dev cache");

  const std::size_t P = model.num_params();
  std::vector<double> params = model.InitParams(config.seed);
  Adam adam(P, config.optimizer);
  Rng shuffle_rng(config.seed ^ 0x5348554646ULL);
  Rng crop_rng(config.seed ^ 0x43524F50ULL);

  const std::size_t N = train.utterances.size();
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::size_t B = config.batch_size;
  std::vector<std::vector<double>> example_grads(B, std::vector<double>(P));
  std::vector<double> example_loss(B);
  std::vector<ModelCache> caches(std::min<std::size_t>(config.threads, B));
  std::vector<double> grads(P);

  TrainResult result;
  std::ostringstream log;
  log << std::setprecision(10);
  double best = std::numeric_limits<double>::infinity();

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < N; start += B) {
      const std::size_t count = std::min(B, N - start);
      std::vector<Tensor3> stacks(count);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = order[start + k];
        std::optional<Tensor3> fresh;
        if (config.recrop_each_epoch && recrop) fresh = recrop(idx, crop_rng);
        stacks[k] = fresh ? std::move(*fresh) : train.Stack(idx);
      }

      const double scale = 1.0 / static_cast<double>(count);
      auto run = [&](std::size_t k, ModelCache& mc) {
        const std::size_t idx = order[start + k];
        const auto logits = model.Forward(params, stacks[k], mc);
        auto ce = CrossEntropy(logits, ClassIndex(train.utterances[idx].label));
        for (double& g : ce.grad) g *= scale;
        std::fill(example_grads[k].begin(), example_grads[k].end(), 0.0);
        model.Backward(params, mc, ce.grad, example_grads[k]);
        example_loss[k] = ce.loss;
      };

      const std::size_t workers = std::min(caches.size(), count);
      if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) run(k, caches[0]);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (std::size_t k = w; k < count; k += workers) run(k, caches[w]);
          });
        }
        for (auto& t : pool) t.join();
      }

      std::fill(grads.begin(), grads.end(), 0.0);
      for (std::size_t k = 0; k < count; ++k) {
        if (!std::isfinite(example_loss[k])) {
          Fail(ErrorCode::kNumerical,
               "non-finite loss at step " + std::to_string(adam.step() + 1) + " (epoch " +
                   std::to_string(epoch) + ", utterance '" +
                   train.utterances[order[start + k]].utt_id + "')");
        }
        loss_sum += example_loss[k];
        for (std::size_t i = 0; i < P; ++i) grads[i] += example_grads[k][i];
      }
      adam.Step(params, grads);
    }

    const double train_loss = loss_sum / static_cast<double>(N);
    const auto dev_scores = ScoreCache(model, params, dev);
    for (const auto& r : dev_scores) {
      if (!std::isfinite(r.score)) {
        Fail(ErrorCode::kNumerical, "non-finite dev score after step " +
                                        std::to_string(adam.step()) + " (epoch " +
                                        std::to_string(epoch) + ", utterance '" + r.utt_id +
                                        "')");
      }
    }
    const double dev_eer = Eer(dev_scores);
    result.epochs.push_back({epoch, train_loss, dev_eer});
    log << epoch << '\t' << train_loss << '\t' << dev_eer << '\n';
    if (progress != nullptr) {
      *progress << std::setprecision(10) << "epoch " << epoch << " train_loss "
                << train_loss << " dev_eer " << dev_eer << " lr " << adam.last_lr()
                << std::endl;
    }
    if (dev_eer < best) {
      best = dev_eer;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  result.best_dev_eer = best;
  log << "retained_epoch\t" << result.best_epoch << '\n';
  result.log = log.str();
  return result;
}

}  // namespace multires
