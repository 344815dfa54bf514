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

#include "multires/multires.h"

#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "multires/config.hpp"
#include "multires/error.hpp"
#include "multires/metrics.hpp"
#include "multires/pipeline.hpp"

struct mr_config {
  multires::AppConfig config;
  mr_log_fn log = nullptr;
  void* log_user = nullptr;
};

struct mr_checkpoint {
  multires::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

mr_status ToStatus(multires::ErrorCode code) {
  return static_cast<mr_status>(static_cast<int>(code));
}

template <typename F>
mr_status Guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return MR_OK;
  } catch (const multires::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MR_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) {
    multires::Fail(multires::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  }
}

void CopyOut(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed != nullptr) *needed = s.size();
  if (buf != nullptr && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

// Collects command output and forwards it to the configured sink.
class LogSink {
 public:
  explicit LogSink(const mr_config* c) : config_(c) {}
  ~LogSink() { Flush(); }
  std::ostream& stream() { return buffer_; }
  void Flush() {
    const std::string text = buffer_.str();
    if (text.empty()) return;
    if (config_->log != nullptr) {
      config_->log(text.c_str(), config_->log_user);
    } else {
      std::cout << text << std::flush;
    }
    buffer_.str("");
  }

 private:
  const mr_config* config_;
  std::ostringstream buffer_;
};

// Streams training progress line by line instead of at the end.
class LineForwarder : public std::stringbuf {
 public:
  explicit LineForwarder(const mr_config* c) : config_(c) {}
  ~LineForwarder() override { sync(); }

 protected:
  int sync() override {
    const std::string text = str();
    if (!text.empty()) {
      if (config_->log != nullptr) {
        config_->log(text.c_str(), config_->log_user);
      } else {
        std::cout << text << std::flush;
      }
      str("");
    }
    return 0;
  }

 private:
  const mr_config* config_;
};

std::vector<multires::ScoreRecord> Records(const double* scores, const int* labels, size_t n) {
  NotNull(scores, "scores");
  NotNull(labels, "labels");
  std::vector<multires::ScoreRecord> r(n);
  for (size_t i = 0; i < n; ++i) {
    r[i].utt_id = std::to_string(i);
    r[i].label = labels[i] ? multires::Label::kBonafide : multires::Label::kSpoof;
    r[i].score = scores[i];
  }
  return r;
}

}  // namespace

extern "C" {

const char* mr_version(void) { return "1.0.0"; }

const char* mr_last_error(void) { return g_last_error.c_str(); }

mr_status mr_config_default(mr_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new mr_config();
  });
}

mr_status mr_config_load(const char* path, mr_config** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto cfg = std::make_unique<mr_config>();
    cfg->config = multires::LoadConfig(path);
    *out = cfg.release();
  });
}

void mr_config_free(mr_config* config) { delete config; }

mr_status mr_config_set(mr_config* config, const char* key, const char* value) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    multires::SetConfigValue(config->config, key, value);
  });
}

mr_status mr_config_set_seed(mr_config* config, uint64_t seed) {
  return Guard([&] {
    NotNull(config, "config");
    multires::OverrideSeed(config->config, seed);
  });
}

mr_status mr_config_get_seed(const mr_config* config, uint64_t* out) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(out, "out");
    *out = config->config.train.seed;
  });
}

mr_status mr_config_validate(const mr_config* config) {
  return Guard([&] {
    NotNull(config, "config");
    multires::ValidateConfig(config->config);
  });
}

mr_status mr_config_serialize(const mr_config* config, char* buf, size_t cap, size_t* needed) {
  return Guard([&] {
    NotNull(config, "config");
    CopyOut(multires::SerializeConfig(config->config), buf, cap, needed);
  });
}

mr_status mr_config_checkpoint_path(const mr_config* config, int refined, char* buf,
                                    size_t cap, size_t* needed) {
  return Guard([&] {
    NotNull(config, "config");
    CopyOut(multires::CheckpointPath(config->config, refined != 0).string(), buf, cap,
            needed);
  });
}

mr_status mr_config_weights_split(const mr_config* config, char* buf, size_t cap,
                                  size_t* needed) {
  return Guard([&] {
    NotNull(config, "config");
    CopyOut(config->config.weights_split, buf, cap, needed);
  });
}

mr_status mr_config_set_log(mr_config* config, mr_log_fn fn, void* user) {
  return Guard([&] {
    NotNull(config, "config");
    config->log = fn;
    config->log_user = user;
  });
}

mr_status mr_gen_data(const mr_config* config) {
  return Guard([&] {
    NotNull(config, "config");
    multires::ValidateConfig(config->config);
    LogSink sink(config);
    multires::CmdGenData(config->config, sink.stream());
  });
}

mr_status mr_extract(const mr_config* config, const char* split) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(split, "split");
    multires::ValidateConfig(config->config);
    LogSink sink(config);
    multires::CmdExtract(config->config, split, sink.stream());
  });
}

mr_status mr_train(const mr_config* config) {
  return Guard([&] {
    NotNull(config, "config");
    multires::ValidateConfig(config->config);
    LineForwarder buf(config);
    std::ostream out(&buf);
    multires::CmdTrain(config->config, out);
    out.flush();
  });
}

mr_status mr_eval(const mr_config* config, const char* checkpoint, const char* split,
                  const char* cache, double* eer, double* min_tdcf) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(checkpoint, "checkpoint");
    NotNull(split, "split");
    multires::ValidateConfig(config->config);
    LogSink sink(config);
    std::optional<std::filesystem::path> override_path;
    if (cache != nullptr) override_path = cache;
    const auto r =
        multires::CmdEval(config->config, checkpoint, split, sink.stream(), override_path);
    if (eer != nullptr) *eer = r.eer;
    if (min_tdcf != nullptr) *min_tdcf = r.min_tdcf;
  });
}

mr_status mr_prune(const mr_config* config, const char* checkpoint, size_t* retained_count) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(checkpoint, "checkpoint");
    multires::ValidateConfig(config->config);
    LineForwarder buf(config);
    std::ostream out(&buf);
    const auto r = multires::CmdPrune(config->config, checkpoint, out);
    out.flush();
    if (retained_count != nullptr) *retained_count = r.prune.retained.size();
  });
}

mr_status mr_inspect_weights(const mr_config* config, const char* checkpoint,
                             const char* split) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(checkpoint, "checkpoint");
    NotNull(split, "split");
    multires::ValidateConfig(config->config);
    LogSink sink(config);
    multires::CmdInspectWeights(config->config, checkpoint, split, sink.stream());
  });
}

mr_status mr_checkpoint_load(const char* path, mr_checkpoint** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto c = std::make_unique<mr_checkpoint>();
    c->ckpt = multires::ReadCheckpoint(path);
    *out = c.release();
  });
}

void mr_checkpoint_free(mr_checkpoint* ckpt) { delete ckpt; }

size_t mr_checkpoint_num_resolutions(const mr_checkpoint* ckpt) {
  return ckpt == nullptr ? 0 : ckpt->ckpt.spec.resolutions.size();
}

size_t mr_checkpoint_num_params(const mr_checkpoint* ckpt) {
  return ckpt == nullptr ? 0 : ckpt->ckpt.params.size();
}

mr_status mr_checkpoint_resolution(const mr_checkpoint* ckpt, size_t index, uint32_t* window,
                                   uint32_t* hop) {
  return Guard([&] {
    NotNull(ckpt, "ckpt");
    const auto& rs = ckpt->ckpt.spec.resolutions;
    multires::Require(index < rs.size(), multires::ErrorCode::kInvalidArgument,
                      "resolution index out of range");
    if (window != nullptr) *window = rs[index].window_len;
    if (hop != nullptr) *hop = rs[index].hop_len;
  });
}

mr_status mr_checkpoint_score_wav(const mr_checkpoint* ckpt, const mr_config* config,
                                  const char* wav_path, double* score) {
  return Guard([&] {
    NotNull(ckpt, "ckpt");
    NotNull(config, "config");
    NotNull(wav_path, "wav_path");
    NotNull(score, "score");
    const auto& c = config->config;
    const multires::Waveform w = multires::ReadWav(wav_path);
    multires::Rng rng(0);
    const auto& rs = ckpt->ckpt.spec.resolutions;
    const auto target = c.target.value_or(
        multires::DefaultTargetDims(rs, w.sample_rate, c.train.target_duration_s));
    const auto stack = multires::ExtractStack(w, rs, c.alignment, target,
                                              c.train.target_duration_s,
                                              multires::CropMode::kEvalLeading, rng);
    const multires::Model model(ckpt->ckpt.spec);
    const auto logits = model.Logits(ckpt->ckpt.params, stack.data);
    *score = logits[1] - logits[0];
  });
}

mr_status mr_eer(const double* scores, const int* labels, size_t n, double* out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = multires::Eer(Records(scores, labels, n));
  });
}

mr_status mr_min_tdcf(const double* scores, const int* labels, size_t n, double c1, double c2,
                      double* out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = multires::MinTdcf(Records(scores, labels, n), multires::TdcfParams{c1, c2});
  });
}

}  // extern "C"
