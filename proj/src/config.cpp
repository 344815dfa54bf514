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

#include "multires/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "multires/error.hpp"
#include "multires/io_util.hpp"

namespace multires {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseUnsigned(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    Fail(ErrorCode::kConfig, "config key '" + key + "': expected a non-negative integer, got '" +
                                 v + "'");
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  double d;
  char extra;
  if (!(in >> d) || (in >> extra) || !std::isfinite(d)) {
    Fail(ErrorCode::kConfig, "config key '" + key + "': expected a number, got '" + v + "'");
  }
  return d;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  Fail(ErrorCode::kConfig, "config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<ResolutionSpec> ParseResolutionList(const std::string& key, const std::string& v) {
  std::vector<ResolutionSpec> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(ParseResolution(item));
    } catch (const Error& e) {
      Fail(ErrorCode::kConfig, "config key '" + key + "': " + e.what());
    }
  }
  return out;
}

std::string FormatDouble(double d) {
  std::ostringstream out;
  out << std::setprecision(17) << d;
  return out.str();
}

struct Field {
  std::function<void(AppConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const AppConfig&)> get;
};

// Sub-object accessor based fields keep the table compact.
template <typename Get>
Field U32(Get get) {
  return {[get](AppConfig& c, const std::string& k, const std::string& v) {
            get(c) = ParseUnsigned<std::uint32_t>(k, v);
          },
          [get](const AppConfig& c) {
            return std::to_string(get(const_cast<AppConfig&>(c)));
          }};
}

template <typename Get>
Field U64(Get get) {
  return {[get](AppConfig& c, const std::string& k, const std::string& v) {
            get(c) = ParseUnsigned<std::uint64_t>(k, v);
          },
          [get](const AppConfig& c) {
            return std::to_string(get(const_cast<AppConfig&>(c)));
          }};
}

template <typename Get>
Field F64(Get get) {
  return {[get](AppConfig& c, const std::string& k, const std::string& v) {
            get(c) = ParseDouble(k, v);
          },
          [get](const AppConfig& c) { return FormatDouble(get(const_cast<AppConfig&>(c))); }};
}

template <typename Get>
Field PathField(Get get) {
  return {[get](AppConfig& c, const std::string& k, const std::string& v) {
            if (v.empty()) Fail(ErrorCode::kConfig, "config key '" + k + "': empty path");
            get(c) = v;
          },
          [get](const AppConfig& c) { return get(const_cast<AppConfig&>(c)).string(); }};
}

const std::vector<std::pair<std::string, Field>>& Fields() {
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"data.sample_rate", U32([](AppConfig& c) -> auto& { return c.sample_rate; })},
      {"data.target_duration_s",
       F64([](AppConfig& c) -> auto& { return c.train.target_duration_s; })},
      {"corpus.n_train", U32([](AppConfig& c) -> auto& { return c.corpus.n_train; })},
      {"corpus.n_dev", U32([](AppConfig& c) -> auto& { return c.corpus.n_dev; })},
      {"corpus.n_eval", U32([](AppConfig& c) -> auto& { return c.corpus.n_eval; })},
      {"corpus.duration_s", F64([](AppConfig& c) -> auto& { return c.corpus.duration_s; })},
      {"corpus.spoof_window",
       U32([](AppConfig& c) -> auto& { return c.corpus.spoof_synthesis.window_len; })},
      {"corpus.spoof_hop",
       U32([](AppConfig& c) -> auto& { return c.corpus.spoof_synthesis.hop_len; })},
      {"corpus.seed", U64([](AppConfig& c) -> auto& { return c.corpus.seed; })},
      {"features.resolutions",
       {[](AppConfig& c, const std::string& k, const std::string& v) {
          c.resolutions = ParseResolutionList(k, v);
        },
        [](const AppConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.resolutions.size(); ++i) {
            if (i) s += ",";
            s += ToString(c.resolutions[i]);
          }
          return s;
        }}},
      {"features.alignment",
       {[](AppConfig& c, const std::string& k, const std::string& v) {
          try {
            c.alignment = ParseAlignMethod(v);
          } catch (const Error& e) {
            Fail(ErrorCode::kConfig, "config key '" + k + "': " + e.what());
          }
        },
        [](const AppConfig& c) { return std::string(ToString(c.alignment)); }}},
      {"features.target_frames",
       {[](AppConfig& c, const std::string& k, const std::string& v) {
          const auto n = ParseUnsigned<std::size_t>(k, v);
          TargetDims d = c.target.value_or(TargetDims{});
          d.frames = n;
          c.target = (d.frames == 0 && d.bins == 0) ? std::nullopt : std::optional(d);
        },
        [](const AppConfig& c) {
          return std::to_string(c.target ? c.target->frames : 0);
        }}},
      {"features.target_bins",
       {[](AppConfig& c, const std::string& k, const std::string& v) {
          const auto n = ParseUnsigned<std::size_t>(k, v);
          TargetDims d = c.target.value_or(TargetDims{});
          d.bins = n;
          c.target = (d.frames == 0 && d.bins == 0) ? std::nullopt : std::optional(d);
        },
        [](const AppConfig& c) { return std::to_string(c.target ? c.target->bins : 0); }}},
      {"features.workers", U32([](AppConfig& c) -> auto& { return c.workers; })},
      {"train.epochs", U32([](AppConfig& c) -> auto& { return c.train.epochs; })},
      {"train.batch_size", U32([](AppConfig& c) -> auto& { return c.train.batch_size; })},
      {"train.seed", U64([](AppConfig& c) -> auto& { return c.train.seed; })},
      {"train.peak_lr", F64([](AppConfig& c) -> auto& { return c.train.optimizer.peak_lr; })},
      {"train.warmup_steps",
       U32([](AppConfig& c) -> auto& { return c.train.optimizer.warmup_steps; })},
      {"train.recrop_each_epoch",
       {[](AppConfig& c, const std::string& k, const std::string& v) {
          c.train.recrop_each_epoch = ParseBool(k, v);
        },
        [](const AppConfig& c) {
          return std::string(c.train.recrop_each_epoch ? "true" : "false");
        }}},
      {"train.threads", U32([](AppConfig& c) -> auto& { return c.train.threads; })},
      {"backend.stem_channels",
       U32([](AppConfig& c) -> auto& { return c.backend.stem_channels; })},
      {"backend.stages", U32([](AppConfig& c) -> auto& { return c.backend.stages; })},
      {"backend.blocks_per_stage",
       U32([](AppConfig& c) -> auto& { return c.backend.blocks_per_stage; })},
      {"backend.se_reduction",
       U32([](AppConfig& c) -> auto& { return c.backend.se_reduction; })},
      {"tdcf.c1", F64([](AppConfig& c) -> auto& { return c.tdcf.c1; })},
      {"tdcf.c2", F64([](AppConfig& c) -> auto& { return c.tdcf.c2; })},
      {"weights.split",
       {[](AppConfig& c, const std::string& k, const std::string& v) {
          if (v != "train" && v != "dev" && v != "eval") {
            Fail(ErrorCode::kConfig,
                 "config key '" + k + "': expected train, dev or eval, got '" + v + "'");
          }
          c.weights_split = v;
        },
        [](const AppConfig& c) { return c.weights_split; }}},
      {"paths.corpus_dir", PathField([](AppConfig& c) -> auto& { return c.corpus_dir; })},
      {"paths.cache_dir", PathField([](AppConfig& c) -> auto& { return c.cache_dir; })},
      {"paths.checkpoint_dir",
       PathField([](AppConfig& c) -> auto& { return c.checkpoint_dir; })},
  };
  return fields;
}

}  // namespace

std::vector<ResolutionSpec> DefaultResolutions() {
  return {{512, 64},   {512, 128},  {1024, 64},  {1024, 128}, {1024, 256},
          {2048, 64},  {2048, 128}, {2048, 256}, {2048, 512}, {400, 160},
          {1724, 130}, {288, 96},   {480, 120}};
}

void SetConfigValue(AppConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : Fields()) {
    if (name == key) {
      field.set(config, key, Trim(value));
      config.corpus.sample_rate = config.sample_rate;
      return;
    }
  }
  Fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
}

AppConfig ParseConfig(const std::string& text) {
  AppConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorCode::kConfig,
           "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (!seen.insert(key).second) {
      Fail(ErrorCode::kConfig, "config key '" + key + "' given more than once");
    }
    SetConfigValue(config, key, line.substr(eq + 1));
  }
  config.corpus.sample_rate = config.sample_rate;
  ValidateConfig(config);
  return config;
}

AppConfig LoadConfig(const std::filesystem::path& path) {
  Require(std::filesystem::exists(path), ErrorCode::kIo,
          "missing config file " + path.string());
  try {
    return ParseConfig(ReadFileText(path));
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

std::string SerializeConfig(const AppConfig& config) {
  std::ostringstream out;
  for (const auto& [name, field] : Fields()) out << name << " = " << field.get(config) << '\n';
  return out.str();
}

void ValidateConfig(const AppConfig& c) {
  Require(!c.resolutions.empty(), ErrorCode::kConfig, "features.resolutions is empty");
  std::set<ResolutionSpec> unique;
  for (const auto& r : c.resolutions) {
    if (!unique.insert(r).second) {
      Fail(ErrorCode::kConfig, "features.resolutions lists " + ToString(r) + " twice");
    }
  }
  Require(c.sample_rate > 0, ErrorCode::kConfig, "data.sample_rate must be positive");
  if (c.target) {
    Require(c.target->frames >= 1 && c.target->bins >= 1, ErrorCode::kConfig,
            "features.target_frames and features.target_bins must both be set");
  }
  Require(c.workers >= 1, ErrorCode::kConfig, "features.workers must be >= 1");
  Require(c.tdcf.c1 > 0.0 && c.tdcf.c2 > 0.0, ErrorCode::kConfig,
          "tdcf.c1 and tdcf.c2 must be positive");
  try {
    ValidateCorpusSpec(c.corpus);
    ValidateTrainConfig(c.train);
    ValidateBackendConfig(c.backend);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
}

void OverrideSeed(AppConfig& config, std::uint64_t seed) {
  config.corpus.seed = seed;
  config.train.seed = seed;
}

}  // namespace multires
