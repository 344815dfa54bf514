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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "multires/formats.hpp"
#include "multires/model.hpp"
#include "multires/random.hpp"
#include "multires/signal_io.hpp"

namespace multires {

struct OptimizerConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  double weight_decay = 1e-9;
  double peak_lr = 1e-3;
  std::uint32_t warmup_steps = 1000;

  bool operator==(const OptimizerConfig&) const = default;
};

// Linear warm-up to peak_lr at `warmup_steps`, then decay with the inverse
// square root of the step: peak_lr * min(step/warmup, sqrt(warmup/step)).
double LrAt(std::uint64_t step, double peak_lr, std::uint32_t warmup_steps);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logits
};

// -log softmax(logits)[label], log-sum-exp stabilised.
LossAndGrad CrossEntropy(std::span<const double> logits, std::size_t label);

inline std::size_t ClassIndex(Label l) { return l == Label::kBonafide ? 1 : 0; }

// Bias-corrected Adam; weight decay is added to the gradient before the
// moment updates.
class Adam {
 public:
  Adam(std::size_t num_params, OptimizerConfig config);

  void Step(std::span<double> params, std::span<const double> grads);

  std::uint64_t step() const { return step_; }
  double last_lr() const { return last_lr_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  OptimizerConfig config_;
  std::uint64_t step_ = 0;
  double last_lr_ = 0.0;
  std::vector<double> m_, v_;
};

struct TrainConfig {
  std::uint32_t epochs = 20;
  std::uint32_t batch_size = 8;
  std::uint64_t seed = 1234;
  double target_duration_s = 4.5;
  bool recrop_each_epoch = true;
  std::uint32_t threads = 1;
  OptimizerConfig optimizer;

  bool operator==(const TrainConfig&) const = default;
};

void ValidateTrainConfig(const TrainConfig& c);

struct EpochRecord {
  std::uint32_t epoch = 0;
  double train_loss = 0.0;
  double dev_eer = 0.0;
};

struct TrainResult {
  std::vector<double> params;  // retained (best dev EER) parameters
  std::uint32_t best_epoch = 0;
  double best_dev_eer = 0.0;
  std::vector<EpochRecord> epochs;
  std::string log;  // epoch<TAB>train_loss<TAB>dev_eer lines + retained_epoch line
};

// Optional per-epoch replacement for a cached training stack (random
// re-cropping of utterances longer than the target duration). Returning
// nullopt keeps the cached stack.
using RecropFn = std::function<std::optional<Tensor3>(std::size_t index, Rng& rng)>;

// Score = logit(bonafide) - logit(spoof), in cache order.
std::vector<ScoreRecord> ScoreCache(const Model& model, std::span<const double> params,
                                    const FeatureCache& cache);

// Mini-batch training with per-epoch dev EER model selection. Ties keep the
// earlier epoch. Per-example gradients are reduced in batch order, so
// results do not depend on the thread count.
TrainResult Train(const Model& model, const FeatureCache& train, const FeatureCache& dev,
                  const TrainConfig& config, const RecropFn& recrop = {},
                  std::ostream* progress = nullptr);

}  // namespace multires
